#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ktree/exactprob.hpp"
#include "ktree/oracle.hpp"

using namespace ktree;
namespace ep = ktree::exactprob;

namespace {

RangeSpec R(long s) { return RangeSpec::fromInteger(Int(s)); }
RangeSpec Rq(long num, long den) { return RangeSpec::fromRational(makeRational(num, den)); }
ExactRational q(long num, long den) { return makeRational(num, den); }

}  // namespace

TEST_CASE("probSumToZ frozen values (brute-forced over <11>^2)") {
    CHECK(ep::probSumToZ(R(11), Int(0)) == q(1, 11));
    CHECK(ep::probSumToZ(R(11), Int(10)) == q(1, 121));
    CHECK(ep::probSumToZ(R(11), Int(-3)) == q(8, 121));
    CHECK_THROWS_AS(ep::probSumToZ(R(11), Int(11)), DomainError);
}

TEST_CASE("probSumInRange frozen values") {
    CHECK(ep::probSumInRange(R(11), q(1, 1)) == q(91, 121));
    CHECK(ep::probSumInRange(R(11), q(1, 100)) == q(1, 11));  // t = 0 reduces to z = 0
    // s=100, p=0.1: t=5, d=101: 11/101 - 30/10201
    CHECK(ep::probSumInRange(R(100), q(1, 10)) == q(11, 101) - q(30, 10201));
}

TEST_CASE("mrDistFromUnif frozen values") {
    CHECK(ep::mrDistFromUnif(R(11), q(1, 1)) == q(91, 66));
    CHECK(ep::mrDistFromUnif(R(11), q(1, 100)) == 1);
    // s = 1000, p = 0.5: strictly above 1, inside the (1-p/2)^-1 (1+30/s) cap.
    ExactRational mr = ep::mrDistFromUnif(R(1000), q(1, 2));
    CHECK(mr > 1);
    CHECK(mr <= q(4, 3) * (1 + q(30, 1000)));
}

TEST_CASE("probSumWithTwoRVInRange frozen values") {
    CHECK(ep::probSumWithTwoRVInRange(R(11), q(1, 1)) == q(781, 1331));
    CHECK(ep::probSumWithTwoRVInRange(R(11), q(1, 100)) == q(1, 121));
    // s=21, p=1/3: value computed by the enumeration oracle
    RangeSpec r = R(21);
    RangeSpec sub = subRangeOf(r, q(1, 3));
    CHECK(ep::probSumWithTwoRVInRange(r, sub) == oracle::probSumWithTwoRVInRangeLiteral(r, sub));
}

TEST_CASE("mrDistFromPairUnif frozen values") {
    CHECK(ep::mrDistFromPairUnif(R(11), q(1, 100)) == 1);
    RangeSpec r = R(11);
    RangeSpec sub = subRangeOf(r, q(1, 1));
    CHECK(ep::mrDistFromPairUnif(r, sub) == oracle::mrDistFromPairUnifLiteral(r, sub));
    // s=101, p=0.2 obeys the (1-p)^-1 (1+4/s) bound
    r = R(101);
    sub = subRangeOf(r, q(1, 5));
    ExactRational bound = q(5, 4) * (1 + q(4, 101));
    CHECK(ep::mrDistFromPairUnif(r, sub) <= bound);
    CHECK(ep::mrDistFromPairUnif(r, sub) >= 1);
}

TEST_CASE("probSumModInRange frozen values") {
    CHECK(ep::probSumModInRange(Int(11), q(1, 1)) == 1);
    CHECK(ep::probSumModInRange(Int(11), q(2, 5)) == q(5, 11));
    CHECK(ep::probSumModInRange(Int(101), q(1, 10)) == q(11, 101));
    CHECK_THROWS_AS(ep::probSumModInRange(Int(12), q(1, 2)), ParamError);
}

TEST_CASE("symmetry and normalization of probSumToZ") {
    for (long s : {3, 7, 11, 24}) {
        RangeSpec r = R(s);
        Int h = r.floorHalf;
        ExactRational total = 0;
        for (Int z = -2 * h; z <= 2 * h; ++z) {
            CHECK(ep::probSumToZ(r, z) == ep::probSumToZ(r, Int(-z)));
            total += ep::probSumToZ(r, z);
        }
        CHECK(total == 1);
    }
}

TEST_CASE("probSumInRange is the partial sum of probSumToZ") {
    for (long s : {11, 36, 101}) {
        RangeSpec r = R(s);
        for (auto p : {q(1, 100), q(1, 3), q(9, 10), q(1, 1)}) {
            RangeSpec sub = subRangeOf(r, p);
            ExactRational total = 0;
            for (Int z = -sub.floorHalf; z <= sub.floorHalf; ++z)
                total += ep::probSumToZ(r, z);
            CHECK(ep::probSumInRange(r, sub) == total);
        }
    }
}

TEST_CASE("operations equal enumeration oracles on a mixed grid") {
    std::vector<RangeSpec> ranges;
    for (long s : {3, 4, 5, 11, 12, 30, 47}) ranges.push_back(R(s));
    ranges.push_back(Rq(7, 2));     // 3.5
    ranges.push_back(Rq(117, 10));  // 11.7
    for (const RangeSpec& r : ranges) {
        for (auto p : {q(1, 100), q(1, 10), q(1, 3), q(1, 2), q(9, 10), q(1, 1)}) {
            RangeSpec sub = subRangeOf(r, p);
            CAPTURE(r.floorHalf.get_str());
            CAPTURE(p.get_str());
            CHECK(ep::probSumInRange(r, sub) == oracle::probSumInRangeBrute(r, sub));
            CHECK(ep::mrDistFromUnif(r, sub) == oracle::mrDistFromUnifBrute(r, sub));
            CHECK(ep::probSumWithTwoRVInRange(r, sub) ==
                  oracle::probSumWithTwoRVInRangeBrute(r, sub));
            CHECK(ep::mrDistFromPairUnif(r, sub) == oracle::mrDistFromPairUnifBrute(r, sub));
        }
        oracle::SumHistogram hist = oracle::sumHistogram(r);
        for (Int z = -2 * r.floorHalf; z <= 2 * r.floorHalf; ++z)
            CHECK(ep::probSumToZ(r, z) == makeRational(hist.countAt(z), hist.total));
    }
    for (long m : {3, 11, 101}) {
        for (auto p : {q(1, 100), q(2, 5), q(1, 1)}) {
            RangeSpec sub = subRangeOf(R(m), p);
            CHECK(ep::probSumModInRange(Int(m), sub) == oracle::probSumModInRangeBrute(Int(m), sub));
        }
    }
}

TEST_CASE("MR distances are >= 1 and equal 1 only on uniform support") {
    for (long s : {5, 11, 40}) {
        RangeSpec r = R(s);
        for (auto p : {q(1, 100), q(1, 2), q(1, 1)}) {
            RangeSpec sub = subRangeOf(r, p);
            ExactRational mr1 = ep::mrDistFromUnif(r, sub);
            ExactRational mr2 = ep::mrDistFromPairUnif(r, sub);
            CHECK(mr1 >= 1);
            CHECK(mr2 >= 1);
            if (sub.cardinality == 1) {
                CHECK(mr1 == 1);
                CHECK(mr2 == 1);
            } else {
                // Sum weight strictly decays away from 0, so the conditioned
                // distribution is non-uniform on any support wider than {0}.
                CHECK(mr1 > 1);
            }
        }
    }
}

TEST_CASE("PrecReal filter parameters floor like their rational counterparts") {
    for (long s : {11, 12, 47}) {
        RangeSpec r = R(s);
        for (auto p : {q(1, 3), q(1, 2), q(9, 10), q(1, 1)}) {
            PrecReal pr = PrecReal::fromRational(p, kDefaultPrecisionBits, Rounding::Nearest);
            CHECK(ep::probSumInRange(r, pr) == ep::probSumInRange(r, p));
            CHECK(ep::mrDistFromUnif(r, pr) == ep::mrDistFromUnif(r, p));
            CHECK(ep::probSumWithTwoRVInRange(r, pr) == ep::probSumWithTwoRVInRange(r, p));
        }
    }
    PrecReal pr = PrecReal::fromRational(q(2, 5), kDefaultPrecisionBits, Rounding::Nearest);
    CHECK(ep::probSumModInRange(Int(11), pr) == q(5, 11));
}

TEST_CASE("centered mod-m sums are uniform (brute force)") {
    for (long m : {3, 5, 11, 101}) {
        long h = (m - 1) / 2;
        std::vector<long> counts(m, 0);
        for (long x = -h; x <= h; ++x)
            for (long y = -h; y <= h; ++y) {
                long s = x + y;
                if (s > h) s -= m;
                if (s < -h) s += m;
                counts[s + h]++;
            }
        for (long c : counts) CHECK(c == m);
    }
}

TEST_CASE("paper inequality conformance on a sample grid") {
    // tools-2: |P - (p - p^2/4)| <= 7/s for s > 10
    // tools-3: MR <= (1-p/2)^-1 (1+30/s) for s > 20
    // tools-4: P3 <= p^2 (1+3/(sp))^2 for s > 10
    // tools-5: MR_pair <= (1-p)^-1 (1+4/s) for s > 20, p <= 1/2
    for (long s : {11, 21, 47, 101}) {
        RangeSpec r = R(s);
        ExactRational sq(s);
        for (auto p : {q(1, 10), q(1, 3), q(1, 2), q(9, 10), q(1, 1)}) {
            RangeSpec sub = subRangeOf(r, p);
            if (s > 10) {
                ExactRational center = p - p * p / 4;
                ExactRational diff = ep::probSumInRange(r, sub) - center;
                CHECK(abs(diff) <= q(7, 1) / sq);
                ExactRational p3 = ep::probSumWithTwoRVInRange(r, sub);
                CHECK(p3 <= p * p * (1 + q(3, 1) / (sq * p)) * (1 + q(3, 1) / (sq * p)));
            }
            if (s > 20) {
                CHECK(ep::mrDistFromUnif(r, sub) <= (1 / (1 - p / 2)) * (1 + q(30, 1) / sq));
                if (p <= q(1, 2))
                    CHECK(ep::mrDistFromPairUnif(r, sub) <= (1 / (1 - p)) * (1 + q(4, 1) / sq));
            }
        }
    }
}
