#include "ktree/harness.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace ktree {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct TrialStats {
    bool success = false;
    std::uint64_t totalSize = 0;
    std::uint64_t maxLevelSize = 0;
    std::uint64_t zeroCount = 0;
};

double meanOf(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double stdOf(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

double hoeffdingRadius(std::uint64_t trials, double delta) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(trials)));
}

std::uint64_t deriveTrialSeed(std::uint64_t master, std::uint64_t trialIndex) {
    return splitmix64(master ^ splitmix64(trialIndex + 0x51ED2701A5C5E493ull));
}

TrialSummary runTrials(const ProblemParams& params, std::uint64_t trials, std::uint64_t seed,
                       unsigned parallelism, const ListGenerator& generator) {
    params.validate();
    if (trials < 1) throw ParamError("trials must be >= 1");
    if (parallelism < 1) parallelism = 1;

    ListGenerator gen = generator;
    if (!gen)
        gen = [](const ProblemParams& p, std::uint64_t s) { return generateLists(p, s); };

    // Per-trial results into fixed slots; aggregation happens afterwards in
    // index order, so scheduling cannot affect the summary.
    std::vector<TrialStats> stats(trials);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr firstError;
    std::atomic<std::uint64_t> firstErrorIndex{~std::uint64_t(0)};
    std::mutex errorMutex;

    auto worker = [&]() {
        while (true) {
            std::uint64_t t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                InputLists lists = gen(params, deriveTrialSeed(seed, t));
                RunTrace trace = runKTree(params, lists);
                stats[t] = {trace.success, trace.totalSize, trace.maxLevelSize, trace.zeroCount};
            } catch (...) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (t < firstErrorIndex.load()) {
                    firstErrorIndex.store(t);
                    firstError = std::current_exception();
                }
            }
        }
    };

    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < parallelism; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (firstError) std::rethrow_exception(firstError);

    TrialSummary out;
    out.trials = trials;
    out.params = params;
    out.seed = seed;
    std::vector<double> totals, maxLevels, zeros, zeroSquares;
    totals.reserve(trials);
    maxLevels.reserve(trials);
    zeros.reserve(trials);
    zeroSquares.reserve(trials);
    for (const TrialStats& s : stats) {
        out.successes += s.success ? 1 : 0;
        totals.push_back(static_cast<double>(s.totalSize));
        maxLevels.push_back(static_cast<double>(s.maxLevelSize));
        double z = static_cast<double>(s.zeroCount);
        zeros.push_back(z);
        zeroSquares.push_back(z * z);
    }
    out.successRate = static_cast<double>(out.successes) / static_cast<double>(trials);
    out.ciRadius99 = hoeffdingRadius(trials);
    out.meanTotalSize = meanOf(totals);
    out.stdTotalSize = stdOf(totals, out.meanTotalSize);
    out.meanMaxLevelSize = meanOf(maxLevels);
    out.stdMaxLevelSize = stdOf(maxLevels, out.meanMaxLevelSize);
    out.meanZeroCount = meanOf(zeros);
    out.meanZeroCountSquared = meanOf(zeroSquares);
    return out;
}

namespace {

struct CriterionEval {
    double value = 0;
    std::optional<double> ci;
    bool reached = false;
};

class CriterionFn {
public:
    CriterionFn(const Int& m, unsigned long k, double target, SearchCriterion criterion,
                const SearchOptions& options)
        : m_(m), k_(k), criterion_(criterion), options_(options),
          target_(PrecReal::fromDouble(target, options.precision, Rounding::Nearest)),
          targetValue_(target) {
        if (criterion != SearchCriterion::Empirical)
            engine_.emplace(m, k, options.mode, options.precision);
    }

    CriterionEval operator()(std::uint64_t n) const {
        CriterionEval ev;
        if (criterion_ == SearchCriterion::Empirical) {
            ProblemParams params{m_, k_, n, options_.mode, options_.precision};
            TrialSummary summary = runTrials(params, options_.trials,
                                             deriveTrialSeed(options_.seed, splitmix64(n)),
                                             options_.parallelism);
            ev.value = summary.successRate;
            ev.ci = summary.ciRadius99;
            ev.reached = summary.successRate >= targetValue_;
            return ev;
        }
        BoundPair prob = engine_->probBounds(Int(n));
        const PrecReal& v =
            criterion_ == SearchCriterion::ComputedLB ? prob.lower : prob.upper;
        ev.value = v.toDouble();
        ev.reached = v >= target_;
        return ev;
    }

private:
    Int m_;
    unsigned long k_;
    SearchCriterion criterion_;
    SearchOptions options_;
    PrecReal target_;
    double targetValue_;
    std::optional<BoundsEngine> engine_;
};

}  // namespace

SearchResult searchN(const Int& m, unsigned long k, double target, SearchCriterion criterion,
                     const SearchOptions& options) {
    if (target <= 0 || target >= 1) throw ParamError("target must be in (0, 1)");
    CriterionFn eval(m, k, target, criterion, options);

    std::uint64_t bestN = 0;
    double bestValue = -1;
    auto probe = [&](std::uint64_t n) {
        CriterionEval ev = eval(n);
        if (ev.value > bestValue) {
            bestValue = ev.value;
            bestN = n;
        }
        return ev;
    };

    CriterionEval ev = probe(1);
    if (ev.reached) return {1, ev.value, ev.ci};
    std::uint64_t lo = 1, hi = 1;
    while (true) {
        if (hi >= options.nMax) throw UnreachableTargetError(bestN, bestValue);
        hi = std::min(hi * 2, options.nMax);
        ev = probe(hi);
        if (ev.reached) break;
        lo = hi;
    }
    // Invariant: criterion(lo) < target <= criterion(hi).
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        ev = probe(mid);
        if (ev.reached)
            hi = mid;
        else
            lo = mid;
    }
    CriterionEval final = eval(hi);
    return {hi, final.value, final.ci};
}

namespace {

SweepRow makeRow(BoundsEngine& engine, const Int& m, unsigned long k, std::uint64_t n,
                 const SweepOptions& options) {
    SweepRow row;
    row.n = n;
    row.c = mul(PrecReal::fromUnsigned(n, options.precision, Rounding::Nearest),
                engine.levels().p(), Rounding::Nearest)
                .toDouble();
    row.prob = engine.probBounds(Int(n));
    row.size = engine.sizeBounds(Int(n));
    if (k >= 4) {
        row.probAnalytic = analyticProbBounds(m, k, Int(n), options.precision);
        row.sizeAnalytic = analyticSizeBounds(m, k, Int(n), options.precision);
    }
    if (options.withEmpirical) {
        ProblemParams params{m, k, n, options.mode, options.precision};
        row.empirical = runTrials(params, options.trials, deriveTrialSeed(options.seed, n),
                                  options.parallelism);
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweepOverN(const Int& m, unsigned long k,
                                 const std::vector<std::uint64_t>& nGrid,
                                 const SweepOptions& options) {
    if (nGrid.empty()) throw ParamError("empty sweep grid");
    BoundsEngine engine(m, k, options.mode, options.precision);
    std::vector<SweepRow> rows;
    rows.reserve(nGrid.size());
    for (std::uint64_t n : nGrid) rows.push_back(makeRow(engine, m, k, n, options));
    return rows;
}

std::vector<SweepRow> sweepOverC(const Int& m, unsigned long k, const std::vector<double>& cGrid,
                                 const SweepOptions& options) {
    if (cGrid.empty()) throw ParamError("empty sweep grid");
    BoundsEngine engine(m, k, options.mode, options.precision);
    std::vector<SweepRow> rows;
    rows.reserve(cGrid.size());
    for (double c : cGrid) {
        if (c <= 0) throw ParamError("c values must be positive");
        // n = round(c / p) = round(c * m^(1/(log k + 1)))
        PrecReal nReal = div(PrecReal::fromDouble(c, options.precision, Rounding::Nearest),
                             engine.levels().p(), Rounding::Nearest);
        double nd = nReal.toDouble();
        std::uint64_t n = static_cast<std::uint64_t>(std::llround(nd));
        if (n < 1) n = 1;
        rows.push_back(makeRow(engine, m, k, n, options));
    }
    return rows;
}

std::vector<ComplexityRow> complexityAtTarget(const Int& m,
                                              const std::vector<unsigned long>& kGrid,
                                              double target, ComplexitySide side,
                                              const SearchOptions& options) {
    if (kGrid.empty()) throw ParamError("empty k grid");
    std::vector<ComplexityRow> rows;
    for (unsigned long k : kGrid) {
        ComplexityRow row;
        row.k = k;
        SearchCriterion criterion = side == ComplexitySide::Sufficient
                                        ? SearchCriterion::ComputedLB
                                        : SearchCriterion::ComputedUB;
        try {
            SearchResult res = searchN(m, k, target, criterion, options);
            row.reachable = true;
            row.n = res.n;
            BoundsEngine engine(m, k, options.mode, options.precision);
            row.c = mul(PrecReal::fromUnsigned(res.n, options.precision, Rounding::Nearest),
                        engine.levels().p(), Rounding::Nearest)
                        .toDouble();
            BoundPair size = engine.sizeBounds(Int(res.n));
            row.size = side == ComplexitySide::Sufficient ? size.upper : size.lower;
        } catch (const UnreachableTargetError& e) {
            row.reachable = false;
            row.bestN = e.bestN();
            row.bestValue = e.bestValue();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ktree
