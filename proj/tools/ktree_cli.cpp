#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ktree/bounds.hpp"
#include "ktree/harness.hpp"
#include "ktree/oracle.hpp"
#include "ktree/output.hpp"
#include "ktree/solver.hpp"

namespace {

using namespace ktree;
using ktree::output::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitParam = 2;
constexpr int kExitUnreachable = 3;
constexpr int kExitResource = 4;

struct CommonFlags {
    std::string m;
    unsigned long k = 4;
    std::string mode = "int";
    long precision = 0;
    std::string format = "json";
    std::string out;
    bool timing = false;
};

mpfr_prec_t resolvePrecision(long flagValue) {
    if (flagValue > 0) return static_cast<mpfr_prec_t>(flagValue);
    if (const char* env = std::getenv("KTREE_PRECISION_BITS")) {
        long v = std::atol(env);
        if (v > 0) return static_cast<mpfr_prec_t>(v);
    }
    return kDefaultPrecisionBits;
}

Mode resolveMode(const std::string& mode) {
    if (mode == "int") return Mode::IntegerSum;
    if (mode == "zm") return Mode::CenteredModSum;
    throw ParamError("mode must be 'int' or 'zm'");
}

void emit(const CommonFlags& flags, const std::string& text) {
    if (flags.out.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream file(flags.out, std::ios::binary);
    if (!file) throw ResourceError("cannot open output file " + flags.out);
    file << text;
    if (text.empty() || text.back() != '\n') file << "\n";
}

void emitRecord(const CommonFlags& flags, ordered_json j, double elapsedMs) {
    if (flags.timing) j["timing"] = ordered_json{{"elapsedMs", elapsedMs}};
    emit(flags, j.dump(2));
}

std::vector<double> parseDoubleList(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<std::uint64_t> parseUintList(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    return out;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double elapsedMs() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

int cmdBounds(const CommonFlags& flags, std::uint64_t n, bool analytic) {
    Timer timer;
    Int m = parseMagnitude(flags.m);
    Mode mode = resolveMode(flags.mode);
    mpfr_prec_t prec = resolvePrecision(flags.precision);
    BoundsEngine engine(m, flags.k, mode, prec);
    SweepRow row;
    row.n = n;
    row.c = mul(PrecReal::fromUnsigned(n, prec, Rounding::Nearest), engine.levels().p(),
                Rounding::Nearest)
                .toDouble();
    row.prob = engine.probBounds(Int(n));
    row.size = engine.sizeBounds(Int(n));
    if (analytic && flags.k >= 4) {
        row.probAnalytic = analyticProbBounds(m, flags.k, Int(n), prec);
        row.sizeAnalytic = analyticSizeBounds(m, flags.k, Int(n), prec);
    } else if (analytic) {
        throw ParamError("analytic bounds require k >= 4");
    }
    if (flags.format == "csv") {
        emit(flags, output::sweepCsv({row}));
        return kExitOk;
    }
    ordered_json results;
    results["c"] = row.c;
    results["prob"] = output::toJson(row.prob);
    results["size"] = output::toJson(row.size);
    if (row.probAnalytic) results["probAnalytic"] = output::toJson(*row.probAnalytic);
    if (row.sizeAnalytic) results["sizeAnalytic"] = output::toJson(*row.sizeAnalytic);
    results["flags"] = output::toJson(engine.flags());
    emitRecord(flags, output::record("bounds", output::paramsJson(m, flags.k, n, mode, prec),
                                     std::move(results)),
               timer.elapsedMs());
    return kExitOk;
}

int cmdSolve(const CommonFlags& flags, std::uint64_t n, std::uint64_t seed,
             const std::string& dumpLists, const std::string& dumpTrace,
             std::uint64_t maxElements) {
    Timer timer;
    Int m = parseMagnitude(flags.m);
    Mode mode = resolveMode(flags.mode);
    mpfr_prec_t prec = resolvePrecision(flags.precision);
    ProblemParams params{m, flags.k, n, mode, prec};
    InputLists lists = generateLists(params, seed);
    SolverLimits limits;
    if (maxElements) limits.maxTotalElements = maxElements;
    RunTrace trace = runKTree(params, lists, limits);
    if (!dumpLists.empty()) {
        std::ofstream file(dumpLists, std::ios::binary);
        if (!file) throw ResourceError("cannot open dump file " + dumpLists);
        dumpInputLists(lists, file);
    }
    if (!dumpTrace.empty()) {
        std::ofstream file(dumpTrace, std::ios::binary);
        if (!file) throw ResourceError("cannot open dump file " + dumpTrace);
        dumpRunTrace(trace, file);
    }
    ordered_json results;
    results["seed"] = seed;
    results["trace"] = output::toJson(trace);
    emitRecord(flags, output::record("solve", output::paramsJson(m, flags.k, n, mode, prec),
                                     std::move(results)),
               timer.elapsedMs());
    return kExitOk;
}

int cmdExperiment(const CommonFlags& flags, std::uint64_t n, std::uint64_t trials,
                  std::uint64_t seed, unsigned parallelism) {
    Timer timer;
    Int m = parseMagnitude(flags.m);
    Mode mode = resolveMode(flags.mode);
    mpfr_prec_t prec = resolvePrecision(flags.precision);
    ProblemParams params{m, flags.k, n, mode, prec};
    TrialSummary summary = runTrials(params, trials, seed, parallelism);
    BoundsEngine engine(m, flags.k, mode, prec);
    BoundPair prob = engine.probBounds(Int(n));
    BoundPair size = engine.sizeBounds(Int(n));

    double ci = summary.ciRadius99;
    bool rateInBounds = summary.successRate >= prob.lower.toDouble() - ci &&
                        summary.successRate <= prob.upper.toDouble() + ci;

    ordered_json results;
    results["summary"] = output::toJson(summary);
    results["prob"] = output::toJson(prob);
    results["size"] = output::toJson(size);
    results["flags"] = output::toJson(engine.flags());
    results["empiricalRateWithinBounds"] = rateInBounds;
    emitRecord(flags, output::record("experiment", output::paramsJson(m, flags.k, n, mode, prec),
                                     std::move(results)),
               timer.elapsedMs());
    return kExitOk;
}

int cmdSearch(const CommonFlags& flags, double target, const std::string& criterion,
              std::uint64_t trials, std::uint64_t seed, std::uint64_t nMax,
              unsigned parallelism) {
    Timer timer;
    Int m = parseMagnitude(flags.m);
    Mode mode = resolveMode(flags.mode);
    mpfr_prec_t prec = resolvePrecision(flags.precision);
    SearchCriterion crit;
    if (criterion == "lb")
        crit = SearchCriterion::ComputedLB;
    else if (criterion == "ub")
        crit = SearchCriterion::ComputedUB;
    else if (criterion == "empirical")
        crit = SearchCriterion::Empirical;
    else
        throw ParamError("criterion must be lb, ub, or empirical");

    SearchOptions options;
    options.trials = trials;
    options.seed = seed;
    options.nMax = nMax;
    options.parallelism = parallelism;
    options.mode = mode;
    options.precision = prec;

    ordered_json results;
    results["target"] = target;
    results["criterion"] = criterion;
    try {
        SearchResult res = searchN(m, flags.k, target, crit, options);
        results["n"] = res.n;
        results["criterionValue"] = res.criterionValue;
        if (res.ciRadius) results["ciRadius99"] = *res.ciRadius;
        emitRecord(flags, output::record("search", output::paramsJson(m, flags.k, 0, mode, prec),
                                         std::move(results)),
                   timer.elapsedMs());
        return kExitOk;
    } catch (const UnreachableTargetError& e) {
        results["unreachable"] = true;
        results["bestN"] = e.bestN();
        results["bestValue"] = e.bestValue();
        emitRecord(flags, output::record("search", output::paramsJson(m, flags.k, 0, mode, prec),
                                         std::move(results)),
                   timer.elapsedMs());
        return kExitUnreachable;
    }
}

int cmdSweep(const CommonFlags& flags, const std::string& cGrid, const std::string& nGrid,
             bool withEmpirical, std::uint64_t trials, std::uint64_t seed, unsigned parallelism) {
    Timer timer;
    Int m = parseMagnitude(flags.m);
    Mode mode = resolveMode(flags.mode);
    mpfr_prec_t prec = resolvePrecision(flags.precision);
    SweepOptions options;
    options.withEmpirical = withEmpirical;
    options.trials = trials;
    options.seed = seed;
    options.parallelism = parallelism;
    options.mode = mode;
    options.precision = prec;

    std::vector<SweepRow> rows;
    if (!cGrid.empty() && !nGrid.empty()) throw ParamError("pass only one of --c-grid/--n-grid");
    if (!cGrid.empty())
        rows = sweepOverC(m, flags.k, parseDoubleList(cGrid), options);
    else if (!nGrid.empty())
        rows = sweepOverN(m, flags.k, parseUintList(nGrid), options);
    else
        throw ParamError("one of --c-grid/--n-grid is required");

    if (flags.format == "csv") {
        emit(flags, output::sweepCsv(rows));
        return kExitOk;
    }
    ordered_json rowsJson = ordered_json::array();
    for (const SweepRow& row : rows) rowsJson.push_back(output::toJson(row));
    ordered_json results;
    results["rows"] = std::move(rowsJson);
    emitRecord(flags, output::record("sweep", output::paramsJson(m, flags.k, 0, mode, prec),
                                     std::move(results)),
               timer.elapsedMs());
    return kExitOk;
}

int cmdComplexity(const CommonFlags& flags, const std::string& kGrid, double target,
                  const std::string& side) {
    Timer timer;
    Int m = parseMagnitude(flags.m);
    Mode mode = resolveMode(flags.mode);
    mpfr_prec_t prec = resolvePrecision(flags.precision);
    ComplexitySide cs;
    if (side == "sufficient")
        cs = ComplexitySide::Sufficient;
    else if (side == "necessary")
        cs = ComplexitySide::Necessary;
    else
        throw ParamError("side must be 'sufficient' or 'necessary'");

    std::vector<unsigned long> ks;
    for (std::uint64_t k : parseUintList(kGrid)) ks.push_back(static_cast<unsigned long>(k));

    SearchOptions options;
    options.mode = mode;
    options.precision = prec;
    std::vector<ComplexityRow> rows = complexityAtTarget(m, ks, target, cs, options);

    ordered_json rowsJson = ordered_json::array();
    for (const ComplexityRow& row : rows) rowsJson.push_back(output::toJson(row));
    ordered_json results;
    results["target"] = target;
    results["side"] = side;
    results["rows"] = std::move(rowsJson);
    emitRecord(flags, output::record("complexity", output::paramsJson(m, 0, 0, mode, prec),
                                     std::move(results)),
               timer.elapsedMs());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-Tree k-SUM solver with provable success-probability and complexity bounds"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto addCommon = [&](CLI::App* cmd, bool needsK = true) {
        cmd->add_option("--m", flags.m, "range size, decimal or 2^b")->required();
        if (needsK) cmd->add_option("--k", flags.k, "number of lists (power of 2)")->required();
        cmd->add_option("--mode", flags.mode, "int or zm (centered mod-m)");
        cmd->add_option("--precision", flags.precision, "working precision bits");
        cmd->add_option("--format", flags.format, "json or csv");
        cmd->add_option("--out", flags.out, "write output to file");
        cmd->add_flag("--timing", flags.timing, "include timing metadata");
    };

    // bounds
    std::uint64_t n = 1;
    bool analytic = false;
    CLI::App* bounds = app.add_subcommand("bounds", "computed (and analytic) bounds at one n");
    addCommon(bounds);
    bounds->add_option("--n", n, "list size")->required();
    bounds->add_flag("--analytic", analytic, "include closed-form bounds");

    // solve
    std::uint64_t seed = 1;
    std::uint64_t maxElements = 0;
    std::string dumpLists, dumpTrace;
    CLI::App* solve = app.add_subcommand("solve", "run one k-Tree instance");
    addCommon(solve);
    solve->add_option("--n", n, "list size")->required();
    solve->add_option("--seed", seed, "input-list seed")->required();
    solve->add_option("--dump-lists", dumpLists, "binary dump of the input lists");
    solve->add_option("--dump-trace", dumpTrace, "binary dump of the run trace");
    solve->add_option("--max-elements", maxElements, "memory cap in total list elements");

    // experiment
    std::uint64_t trials = 1000;
    unsigned parallelism = 1;
    CLI::App* experiment = app.add_subcommand("experiment", "Monte-Carlo trials vs bounds");
    addCommon(experiment);
    experiment->add_option("--n", n, "list size")->required();
    experiment->add_option("--trials", trials, "number of trials");
    experiment->add_option("--seed", seed, "master seed");
    experiment->add_option("--parallelism", parallelism, "worker threads");

    // search
    double target = 0.5;
    std::string criterion = "lb";
    std::uint64_t nMax = std::uint64_t(1) << 40;
    CLI::App* search = app.add_subcommand("search", "minimum n reaching a target probability");
    addCommon(search);
    search->add_option("--target", target, "target probability in (0,1)")->required();
    search->add_option("--criterion", criterion, "lb, ub, or empirical");
    search->add_option("--trials", trials, "trials per empirical probe");
    search->add_option("--seed", seed, "master seed");
    search->add_option("--n-max", nMax, "search limit");
    search->add_option("--parallelism", parallelism, "worker threads");

    // sweep
    std::string cGrid, nGrid;
    bool withEmpirical = false;
    CLI::App* sweep = app.add_subcommand("sweep", "bounds (and trials) over a grid of n");
    addCommon(sweep);
    sweep->add_option("--c-grid", cGrid, "comma-separated c values");
    sweep->add_option("--n-grid", nGrid, "comma-separated n values");
    sweep->add_flag("--with-empirical", withEmpirical, "run trials per row");
    sweep->add_option("--trials", trials, "trials per row");
    sweep->add_option("--seed", seed, "master seed");
    sweep->add_option("--parallelism", parallelism, "worker threads");

    // complexity
    std::string kGrid, side = "sufficient";
    CLI::App* complexity =
        app.add_subcommand("complexity", "list sizes and total-size bounds at a target");
    addCommon(complexity, /*needsK=*/false);
    complexity->add_option("--k-grid", kGrid, "comma-separated k values")->required();
    complexity->add_option("--target", target, "target probability")->required();
    complexity->add_option("--side", side, "sufficient or necessary");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed()) return cmdBounds(flags, n, analytic);
        if (solve->parsed()) return cmdSolve(flags, n, seed, dumpLists, dumpTrace, maxElements);
        if (experiment->parsed()) return cmdExperiment(flags, n, trials, seed, parallelism);
        if (search->parsed())
            return cmdSearch(flags, target, criterion, trials, seed, nMax, parallelism);
        if (sweep->parsed())
            return cmdSweep(flags, cGrid, nGrid, withEmpirical, trials, seed, parallelism);
        if (complexity->parsed()) return cmdComplexity(flags, kGrid, target, side);
    } catch (const ParamError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitParam;
    } catch (const DomainError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitParam;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitParam;
}
