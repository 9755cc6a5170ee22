#include "ktree/exactprob.hpp"

namespace ktree::exactprob {

namespace {

void checkSub(const RangeSpec& r, const RangeSpec& sub) {
    if (sub.floorHalf < 0 || sub.floorHalf > r.floorHalf)
        throw DomainError("sub-range exceeds the base range");
}

ExactRational maxq(const ExactRational& a, const ExactRational& b) { return a >= b ? a : b; }

}  // namespace

ExactRational probSumToZ(const RangeSpec& r, const Int& z) {
    Int az = abs(z);
    if (az > 2 * r.floorHalf)
        throw DomainError("|z| > 2*floor(s/2): probability is 0, formula does not apply");
    const Int& d = r.cardinality;
    return makeRational(d - az, d * d);
}

ExactRational probSumInRange(const RangeSpec& r, const RangeSpec& sub) {
    checkSub(r, sub);
    const Int& t = sub.floorHalf;
    const Int& d = r.cardinality;
    // (2t+1)/d - (t^2+t)/d^2
    return makeRational((2 * t + 1) * d - (t * t + t), d * d);
}

ExactRational mrDistFromUnif(const RangeSpec& r, const RangeSpec& sub) {
    checkSub(r, sub);
    ExactRational total = probSumInRange(r, sub);
    if (total == 0) throw DomainError("conditioned sum distribution has empty support");
    ExactRational alpha = probSumToZ(r, Int(0)) / total;
    ExactRational beta = probSumToZ(r, sub.floorHalf) / total;
    ExactRational u = makeRational(1, sub.cardinality);
    return maxq(alpha / u, u / beta);
}

ExactRational probSumWithTwoRVInRange(const RangeSpec& r, const RangeSpec& sub) {
    checkSub(r, sub);
    const Int& h = r.floorHalf;
    const Int& t = sub.floorHalf;
    const Int& bigD = r.cardinality;
    const Int& smallD = sub.cardinality;
    Int d3 = bigD * bigD * bigD;
    // Middle band of w values where both windows fit entirely inside <s>:
    // 2*(h - t) + 1 of them, each contributing (|<sp>|/|<s>|)^2.
    ExactRational alpha = makeRational((2 * (h - t) + 1) * smallD * smallD, d3);
    // Edge bands: sum of squared window overlaps, telescoped as a difference
    // of square pyramids.
    Int x = smallD - 1;
    Int y = smallD - 1 - t;
    Int pyramids = x * (x + 1) * (2 * x + 1) - y * (y + 1) * (2 * y + 1);
    ExactRational beta = makeRational(2 * pyramids, d3 * 6);
    return alpha + beta;
}

ExactRational mrDistFromPairUnif(const RangeSpec& r, const RangeSpec& sub) {
    checkSub(r, sub);
    ExactRational p3 = probSumWithTwoRVInRange(r, sub);
    if (p3 == 0) throw DomainError("conditioned pair distribution has empty support");
    const Int& h = r.floorHalf;
    const Int& t = sub.floorHalf;
    const Int& bigD = r.cardinality;
    Int d3 = bigD * bigD * bigD;
    // Heaviest point of the joint distribution is (0,0): bigD choices of w.
    ExactRational maxMass = makeRational(bigD, d3) / p3;
    // Lightest is (-t, t) (or its mirror): the three w-intervals overlap in
    // 2*(h - t) + 1 points.
    ExactRational minMass = makeRational(2 * (h - t) + 1, d3) / p3;
    ExactRational u = makeRational(1, sub.cardinality * sub.cardinality);
    return maxq(maxMass / u, u / minMass);
}

ExactRational probSumModInRange(const Int& m, const RangeSpec& sub) {
    if (m < 3 || mpz_even_p(m.get_mpz_t()))
        throw ParamError("centered mod-m sum requires odd m >= 3");
    if (sub.cardinality > m) throw DomainError("sub-range exceeds Z_m");
    return makeRational(sub.cardinality, m);
}

ExactRational probSumInRange(const RangeSpec& r, const ExactRational& p) {
    return probSumInRange(r, subRangeOf(r, p));
}

ExactRational mrDistFromUnif(const RangeSpec& r, const ExactRational& p) {
    return mrDistFromUnif(r, subRangeOf(r, p));
}

ExactRational probSumWithTwoRVInRange(const RangeSpec& r, const ExactRational& p) {
    return probSumWithTwoRVInRange(r, subRangeOf(r, p));
}

ExactRational mrDistFromPairUnif(const RangeSpec& r, const ExactRational& p) {
    return mrDistFromPairUnif(r, subRangeOf(r, p));
}

ExactRational probSumModInRange(const Int& m, const ExactRational& p) {
    return probSumModInRange(m, subRangeOf(RangeSpec::fromInteger(m), p));
}

ExactRational probSumInRange(const RangeSpec& r, const PrecReal& p) {
    return probSumInRange(r, subRangeOf(r, p));
}

ExactRational mrDistFromUnif(const RangeSpec& r, const PrecReal& p) {
    return mrDistFromUnif(r, subRangeOf(r, p));
}

ExactRational probSumWithTwoRVInRange(const RangeSpec& r, const PrecReal& p) {
    return probSumWithTwoRVInRange(r, subRangeOf(r, p));
}

ExactRational mrDistFromPairUnif(const RangeSpec& r, const PrecReal& p) {
    return mrDistFromPairUnif(r, subRangeOf(r, p));
}

ExactRational probSumModInRange(const Int& m, const PrecReal& p) {
    return probSumModInRange(m, subRangeOf(RangeSpec::fromInteger(m), p));
}

}  // namespace ktree::exactprob
