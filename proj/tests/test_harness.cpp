#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ktree/harness.hpp"

using namespace ktree;

TEST_CASE("hoeffding radius matches hand values") {
    CHECK(hoeffdingRadius(1000) == doctest::Approx(0.0514662).epsilon(1e-5));
    CHECK(hoeffdingRadius(10) == doctest::Approx(std::sqrt(std::log(200.0) / 20.0)).epsilon(1e-12));
}

TEST_CASE("injected all-zero lists give certain success") {
    ProblemParams params{Int(10007), 4, 1, Mode::IntegerSum, kDefaultPrecisionBits};
    ListGenerator zeros = [](const ProblemParams& p, std::uint64_t seed) {
        InputLists lists;
        lists.m = p.m;
        lists.k = p.k;
        lists.n = p.n;
        lists.mode = p.mode;
        lists.seed = seed;
        lists.lists.assign(p.k, std::vector<Int>(p.n, Int(0)));
        return lists;
    };
    TrialSummary s = runTrials(params, 10, 7, 1, zeros);
    CHECK(s.successes == 10);
    CHECK(s.successRate == 1.0);
    CHECK(s.ciRadius99 == doctest::Approx(0.51475).epsilon(1e-4));
    CHECK(s.meanZeroCount == 1.0);
    CHECK(s.meanTotalSize == 7.0);
    CHECK(s.stdTotalSize == 0.0);
}

TEST_CASE("summaries are identical across parallelism levels") {
    ProblemParams params{Int(1) << 24, 4, 250, Mode::IntegerSum, kDefaultPrecisionBits};
    TrialSummary serial = runTrials(params, 64, 42, 1);
    TrialSummary parallel = runTrials(params, 64, 42, 8);
    CHECK(serial.successes == parallel.successes);
    CHECK(serial.meanTotalSize == parallel.meanTotalSize);
    CHECK(serial.stdTotalSize == parallel.stdTotalSize);
    CHECK(serial.meanZeroCount == parallel.meanZeroCount);
    CHECK(serial.meanZeroCountSquared == parallel.meanZeroCountSquared);
    CHECK(serial.meanMaxLevelSize == parallel.meanMaxLevelSize);
}

TEST_CASE("trial seeds are pure functions of (seed, index)") {
    CHECK(deriveTrialSeed(1, 0) == deriveTrialSeed(1, 0));
    CHECK(deriveTrialSeed(1, 0) != deriveTrialSeed(1, 1));
    CHECK(deriveTrialSeed(1, 0) != deriveTrialSeed(2, 0));
}

TEST_CASE("searchN self-consistency on the computed upper bound") {
    SearchOptions options;
    SearchResult res = searchN(Int(1) << 64, 4, 0.99, SearchCriterion::ComputedUB, options);
    BoundsEngine engine(Int(1) << 64, 4);
    PrecReal target = PrecReal::fromDouble(0.99, kDefaultPrecisionBits, Rounding::Nearest);
    CHECK(engine.probBounds(Int(res.n)).upper >= target);
    REQUIRE(res.n > 1);
    CHECK(engine.probBounds(Int(res.n - 1)).upper < target);
}

TEST_CASE("searchN for the computed lower bound lands just above c = 1") {
    SearchOptions options;
    SearchResult res = searchN(Int(1) << 96, 4, 0.5, SearchCriterion::ComputedLB, options);
    double c = static_cast<double>(res.n) * std::exp2(-32);
    CHECK(c >= 1.0);
    CHECK(c <= 1.5);
}

TEST_CASE("searchN reports unreachable targets with the best probe") {
    SearchOptions options;
    options.nMax = 1 << 20;
    try {
        searchN(Int(1) << 24, 64, 0.999999, SearchCriterion::ComputedLB, options);
        FAIL("expected UnreachableTargetError");
    } catch (const UnreachableTargetError& e) {
        CHECK(e.bestN() > 0);
        CHECK(e.bestValue() < 0.999999);
        CHECK(e.bestValue() >= 0.0);
    }
    CHECK_FALSE(hypothesisCheck(Int(1) << 24, 64).allTrue());
}

TEST_CASE("empirical search uses fresh per-probe seeds and reports a CI") {
    SearchOptions options;
    options.trials = 40;
    options.seed = 9;
    SearchResult res = searchN(Int(1) << 20, 4, 0.5, SearchCriterion::Empirical, options);
    CHECK(res.ciRadius.has_value());
    CHECK(*res.ciRadius == doctest::Approx(hoeffdingRadius(40)));
    CHECK(res.criterionValue >= 0.5);
    // Deterministic: same options give the same result.
    SearchResult res2 = searchN(Int(1) << 20, 4, 0.5, SearchCriterion::Empirical, options);
    CHECK(res2.n == res.n);
    CHECK(res2.criterionValue == res.criterionValue);
}

TEST_CASE("sweep at c = 1 picks n = round(m^(1/3))") {
    SweepOptions options;
    std::vector<SweepRow> rows = sweepOverC(Int(1) << 64, 4, {1.0}, options);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 2642246);  // 2^(64/3) = 2642245.94...
}

TEST_CASE("sweep rows carry both computed and analytic bounds") {
    SweepOptions options;
    std::vector<SweepRow> rows = sweepOverC(Int(1) << 64, 4, {0.5, 1.0, 2.0}, options);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].c == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(rows[1].c == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rows[2].c == doctest::Approx(2.0).epsilon(1e-3));
    for (const auto& row : rows) {
        CHECK(row.probAnalytic.has_value());
        CHECK(row.sizeAnalytic.has_value());
        CHECK(row.prob.lower <= row.prob.upper);
    }
    CHECK(rows[0].n < rows[1].n);
    CHECK(rows[1].n < rows[2].n);

    // n-grid: strictly increasing n means strictly increasing c.
    rows = sweepOverN(Int(1) << 64, 4, {100, 200, 400}, options);
    CHECK(rows[0].c < rows[1].c);
    CHECK(rows[1].c < rows[2].c);
}

TEST_CASE("sweep with empirical trials stays within bounds +- CI") {
    SweepOptions options;
    options.withEmpirical = true;
    options.trials = 60;
    options.seed = 13;
    std::vector<SweepRow> rows = sweepOverC(Int(1) << 24, 4, {1.0}, options);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].empirical.has_value());
    const TrialSummary& e = *rows[0].empirical;
    double lb = rows[0].prob.lower.toDouble(), ub = rows[0].prob.upper.toDouble();
    CHECK(e.successRate >= lb - e.ciRadius99);
    CHECK(e.successRate <= ub + e.ciRadius99);
}

TEST_CASE("minimum-complexity k grows with m at a high target") {
    SearchOptions options;
    std::vector<unsigned long> ks{4, 8, 16, 32, 64, 128};
    auto argminK = [&](const Int& m) {
        auto rows = complexityAtTarget(m, ks, 0.99, ComplexitySide::Sufficient, options);
        double best = 1e300;
        unsigned long bestK = 0;
        for (const auto& row : rows) {
            if (!row.reachable) continue;
            double v = row.size->log2Value();
            if (v < best) {
                best = v;
                bestK = row.k;
            }
        }
        return bestK;
    };
    CHECK(argminK(Int(1) << 64) < argminK(Int(1) << 96));
}

TEST_CASE("empirical zero-count mean tracks the first-moment bracket") {
    Int m = Int(1) << 24;
    unsigned long n = 256;  // c = 1 at k = 4, p = 2^-8
    ProblemParams params{m, 4, n, Mode::IntegerSum, kDefaultPrecisionBits};
    TrialSummary s = runTrials(params, 300, 2024, 1);
    BoundsEngine engine(m, 4);
    BoundPair fm = engine.firstMomentBounds(Int(n));
    // Standard error of the mean count, estimated from the sample itself.
    double var = std::max(0.0, s.meanZeroCountSquared - s.meanZeroCount * s.meanZeroCount);
    double se = std::sqrt(var / static_cast<double>(s.trials));
    CHECK(s.meanZeroCount >= fm.lower.toDouble() - 3 * se);
    CHECK(s.meanZeroCount <= fm.upper.toDouble() + 3 * se);
}

TEST_CASE("complexity rows mark unreachable k and report sizes elsewhere") {
    SearchOptions options;
    options.nMax = 1 << 22;
    std::vector<ComplexityRow> rows =
        complexityAtTarget(Int(1) << 24, {4ul, 64ul}, 0.999999, ComplexitySide::Sufficient,
                           options);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[1].reachable);  // k = 64 plateaus below the target

    rows = complexityAtTarget(Int(1) << 32, {4ul, 8ul}, 0.5, ComplexitySide::Sufficient, options);
    for (const auto& row : rows) {
        REQUIRE(row.reachable);
        CHECK(row.size.has_value());
        CHECK(row.n > 0);
    }

    rows = complexityAtTarget(Int(1) << 32, {4ul}, 0.5, ComplexitySide::Necessary, options);
    REQUIRE(rows[0].reachable);
    // Necessary size (LB at the first n where UB reaches target) is at most
    // sufficient size (UB at the first n where LB reaches target).
    std::vector<ComplexityRow> suff =
        complexityAtTarget(Int(1) << 32, {4ul}, 0.5, ComplexitySide::Sufficient, options);
    CHECK(rows[0].n <= suff[0].n);
    CHECK(*rows[0].size <= *suff[0].size);
}
