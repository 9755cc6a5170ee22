#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ktree/bounds.hpp"
#include "ktree/common.hpp"
#include "ktree/solver.hpp"

namespace ktree {

struct TrialSummary {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double successRate = 0;
    double ciRadius99 = 0;
    double meanTotalSize = 0, stdTotalSize = 0;
    double meanMaxLevelSize = 0, stdMaxLevelSize = 0;
    double meanZeroCount = 0, meanZeroCountSquared = 0;
    ProblemParams params;
    std::uint64_t seed = 0;
};

// Two-sided Hoeffding radius at confidence 1 - delta.
double hoeffdingRadius(std::uint64_t trials, double delta = 0.01);

// Per-trial stream seed: a pure function of (master seed, trial index), so
// results are independent of scheduling.
std::uint64_t deriveTrialSeed(std::uint64_t master, std::uint64_t trialIndex);

using ListGenerator = std::function<InputLists(const ProblemParams&, std::uint64_t)>;

TrialSummary runTrials(const ProblemParams& params, std::uint64_t trials, std::uint64_t seed,
                       unsigned parallelism = 1, const ListGenerator& generator = {});

enum class SearchCriterion { ComputedLB, ComputedUB, Empirical };

struct SearchOptions {
    std::uint64_t nMax = std::uint64_t(1) << 40;
    std::uint64_t trials = 200;  // per empirical probe
    std::uint64_t seed = 1;
    unsigned parallelism = 1;
    Mode mode = Mode::IntegerSum;
    mpfr_prec_t precision = kDefaultPrecisionBits;
};

struct SearchResult {
    std::uint64_t n = 0;
    double criterionValue = 0;
    std::optional<double> ciRadius;  // present for empirical probes
};

// Raised when the criterion cannot reach the target by nMax; carries the
// best probe seen.
class UnreachableTargetError : public std::runtime_error {
public:
    UnreachableTargetError(std::uint64_t bestN, double bestValue)
        : std::runtime_error("target unreachable up to nMax"),
          bestN_(bestN), bestValue_(bestValue) {}
    std::uint64_t bestN() const { return bestN_; }
    double bestValue() const { return bestValue_; }

private:
    std::uint64_t bestN_;
    double bestValue_;
};

// Smallest n whose criterion value reaches `target`, assuming the criterion
// is monotone in n; bracket-doubling then bisection. Empirical probes use a
// fresh seed derived from (options.seed, n) and fixed trials per probe;
// bisection decisions use the point estimates with no sequential-testing
// correction, and the returned CI describes the final probe only.
SearchResult searchN(const Int& m, unsigned long k, double target, SearchCriterion criterion,
                     const SearchOptions& options = {});

struct SweepOptions {
    bool withEmpirical = false;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned parallelism = 1;
    Mode mode = Mode::IntegerSum;
    mpfr_prec_t precision = kDefaultPrecisionBits;
};

struct SweepRow {
    std::uint64_t n = 0;
    double c = 0;
    BoundPair prob, size;
    std::optional<BoundPair> probAnalytic, sizeAnalytic;  // absent for k = 2
    std::optional<TrialSummary> empirical;
};

std::vector<SweepRow> sweepOverN(const Int& m, unsigned long k,
                                 const std::vector<std::uint64_t>& nGrid,
                                 const SweepOptions& options = {});
std::vector<SweepRow> sweepOverC(const Int& m, unsigned long k, const std::vector<double>& cGrid,
                                 const SweepOptions& options = {});

enum class ComplexitySide { Sufficient, Necessary };

struct ComplexityRow {
    unsigned long k = 0;
    bool reachable = false;
    std::uint64_t n = 0;
    double c = 0;
    // Size UB at the sufficient n, or size LB at the necessary n.
    std::optional<PrecReal> size;
    // Best probe when unreachable.
    std::uint64_t bestN = 0;
    double bestValue = 0;
};

std::vector<ComplexityRow> complexityAtTarget(const Int& m,
                                              const std::vector<unsigned long>& kGrid,
                                              double target, ComplexitySide side,
                                              const SearchOptions& options = {});

}  // namespace ktree
