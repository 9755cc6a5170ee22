#include "ktree/params.hpp"

#include <numeric>

namespace ktree {

void ProblemParams::validate() const {
    if (m < 3) throw ParamError("m must be >= 3");
    checkedLogK(Int(k));
    if (n < 1) throw ParamError("n must be >= 1");
    if (mode == Mode::CenteredModSum && mpz_even_p(m.get_mpz_t()))
        throw ParamError("m must be odd in centered mod-m mode");
    if (precisionBits < 64) throw ParamError("precisionBits must be >= 64");
}

RangeSpec RangeSpec::fromInteger(const Int& v, mpfr_prec_t prec) {
    if (v < 1) throw DomainError("range size must be >= 1");
    RangeSpec r;
    r.s = PrecReal::fromInteger(v, prec, Rounding::Nearest);
    r.floorHalf = v / 2;
    r.cardinality = 2 * r.floorHalf + 1;
    r.exactS = ExactRational(v);
    return r;
}

RangeSpec RangeSpec::fromRational(const ExactRational& q, mpfr_prec_t prec) {
    if (q <= 0) throw DomainError("range size must be positive");
    RangeSpec r;
    r.s = PrecReal::fromRational(q, prec, Rounding::Nearest);
    Int num = q.get_num(), den = q.get_den();
    mpz_fdiv_q(r.floorHalf.get_mpz_t(), num.get_mpz_t(), Int(2 * den).get_mpz_t());
    r.cardinality = 2 * r.floorHalf + 1;
    r.exactS = q;
    return r;
}

RangeSpec RangeSpec::fromReal(const PrecReal& s) {
    if (s.isZero()) throw DomainError("range size must be positive");
    PrecReal half = div(s, PrecReal::fromUnsigned(2, s.precision(), Rounding::Nearest),
                        Rounding::Nearest);
    RangeSpec r;
    r.s = s;
    // A representation within 2^-(prec/2) of an integer denotes it exactly.
    r.floorHalf = half.snapFloor();
    r.cardinality = 2 * r.floorHalf + 1;
    return r;
}

RangeSpec subRangeOf(const RangeSpec& r, const ExactRational& p) {
    if (p <= 0 || p > 1) throw DomainError("p must be in (0, 1]");
    if (r.exactS) return RangeSpec::fromRational(ExactRational(*r.exactS * p), r.s.precision());
    return RangeSpec::fromReal(
        mul(r.s, PrecReal::fromRational(p, r.s.precision(), Rounding::Nearest), Rounding::Nearest));
}

RangeSpec subRangeOf(const RangeSpec& r, const PrecReal& p) {
    return RangeSpec::fromReal(mul(r.s, p, Rounding::Nearest));
}

PrecReal filterParam(const Int& m, unsigned long k, mpfr_prec_t prec, Rounding dir) {
    if (m < 3) throw ParamError("m must be >= 3");
    unsigned logK = checkedLogK(Int(k));
    return PrecReal::integerPowRatio(m, -1, logK + 1, prec, dir);
}

PrecReal levelRange(const Int& m, const PrecReal& p, unsigned d) {
    PrecReal mm = PrecReal::fromInteger(m, p.precision(), Rounding::Nearest);
    return mul(mm, pow(p, Int(d), Rounding::Nearest), Rounding::Nearest);
}

Int rangeCardinality(const PrecReal& s) {
    if (s < PrecReal::one(s.precision())) throw DomainError("range size must be >= 1");
    return RangeSpec::fromReal(s).cardinality;
}

HypothesisFlags hypothesisCheck(const Int& m, unsigned long k, mpfr_prec_t prec) {
    unsigned logK = checkedLogK(Int(k));
    HypothesisFlags f;
    f.kGe4 = k >= 4;
    f.mGt30Pow = m > intPow(30, logK + 1);
    f.mGt7k = m > Int(7) * Int(k);

    PrecReal pUp = PrecReal::integerPowRatio(m, -1, logK + 1, prec, Rounding::Up);
    PrecReal pDown = PrecReal::integerPowRatio(m, -1, logK + 1, prec, Rounding::Down);
    f.pLt1over30 =
        pUp < PrecReal::fromRational(makeRational(1, 30), prec, Rounding::Down);

    // m * p^(log k) = m^(1/(log k + 1))
    PrecReal mpLDown = PrecReal::integerPowRatio(m, 1, logK + 1, prec, Rounding::Down);
    f.mpLogKGt30 = mpLDown > PrecReal::fromUnsigned(30, prec, Rounding::Up);

    PrecReal lhs = mul(pDown, PrecReal::fromUnsigned(k, prec, Rounding::Down), Rounding::Down);
    PrecReal rhs = pow(PrecReal::fromRational(makeRational(7, m), prec, Rounding::Up),
                       Int(k / 2 - 1), Rounding::Up);
    f.pkCond = lhs > rhs;
    return f;
}

namespace {

// Detect whether m^(num/den) is an exact integer (with num/den in lowest
// terms); when it is, return it.
std::optional<Int> exactPower(const Int& m, unsigned long num, unsigned long den) {
    if (den == 1) return intPow(m, num);
    Int root;
    int exact = mpz_root(root.get_mpz_t(), m.get_mpz_t(), den);
    if (!exact) return std::nullopt;
    return intPow(root, num);
}

}  // namespace

LevelRanges::LevelRanges(const Int& m, unsigned long k, mpfr_prec_t prec)
    : m_(m), k_(k), logK_(checkedLogK(Int(k))), prec_(prec) {
    if (m < 3) throw ParamError("m must be >= 3");
    p_ = filterParam(m, k, prec, Rounding::Nearest);
    unsigned L = logK_;
    ranges_.resize(L + 1);
    for (unsigned d = 0; d <= L; ++d) {
        // s_d = m^((L+1-d)/(L+1))
        unsigned long j = L + 1 - d;
        unsigned long g = std::gcd<unsigned long>(j, L + 1);
        auto exact = exactPower(m, j / g, (L + 1) / g);
        if (exact) {
            ranges_[d] = RangeSpec::fromInteger(*exact, prec);
            continue;
        }
        mpfr_prec_t workPrec = prec;
        bool done = false;
        for (int attempt = 0; attempt < 8 && !done; ++attempt, workPrec *= 2) {
            PrecReal s = PrecReal::integerPowRatio(m, static_cast<long>(j), L + 1, workPrec,
                                                   Rounding::Nearest);
            PrecReal half =
                div(s, PrecReal::fromUnsigned(2, workPrec, Rounding::Nearest), Rounding::Nearest);
            auto fh = half.tryFloor();
            if (fh) {
                ranges_[d].s = PrecReal::integerPowRatio(m, static_cast<long>(j), L + 1, prec,
                                                         Rounding::Nearest);
                ranges_[d].floorHalf = *fh;
                ranges_[d].cardinality = 2 * *fh + 1;
                done = true;
            }
        }
        if (!done)
            throw ResourceError("level range floor not certifiable after precision doubling");
    }
}

const RangeSpec& LevelRanges::at(unsigned d) const {
    if (d >= ranges_.size()) throw DomainError("level index out of range");
    return ranges_[d];
}

Int parseMagnitude(const std::string& text) {
    if (text.empty()) throw ParamError("empty integer literal");
    auto caret = text.find('^');
    if (caret != std::string::npos) {
        std::string base = text.substr(0, caret), exp = text.substr(caret + 1);
        try {
            Int b(base);
            unsigned long e = std::stoul(exp);
            if (b < 2) throw ParamError("power base must be >= 2: " + text);
            return intPow(b, e);
        } catch (const std::invalid_argument&) {
            throw ParamError("bad power literal: " + text);
        }
    }
    try {
        return Int(text);
    } catch (const std::invalid_argument&) {
        throw ParamError("bad integer literal: " + text);
    }
}

}  // namespace ktree
