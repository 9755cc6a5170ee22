#include "ktree/output.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace ktree::output {

namespace {

std::string doubleString(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string magnitudeString(const Int& m) {
    if (m >= 2 && mpz_popcount(m.get_mpz_t()) == 1)
        return "2^" + std::to_string(mpz_sizeinbase(m.get_mpz_t(), 2) - 1);
    return m.get_str();
}

ordered_json endpointJson(const PrecReal& v, const char* rounding) {
    ordered_json j;
    j["decimal"] = v.toDecimalString();
    if (v.isZero())
        j["log2"] = nullptr;
    else
        j["log2"] = v.log2Value();
    j["rounding"] = rounding;
    return j;
}

ordered_json toJson(const BoundPair& pair) {
    ordered_json j;
    j["lower"] = endpointJson(pair.lower, "down");
    j["upper"] = endpointJson(pair.upper, "up");
    return j;
}

ordered_json toJson(const HypothesisFlags& flags) {
    ordered_json j;
    j["kGe4"] = flags.kGe4;
    j["mGt30Pow"] = flags.mGt30Pow;
    j["pLt1over30"] = flags.pLt1over30;
    j["mpLogKGt30"] = flags.mpLogKGt30;
    j["mGt7k"] = flags.mGt7k;
    j["pkCond"] = flags.pkCond;
    j["allTrue"] = flags.allTrue();
    return j;
}

ordered_json toJson(const TrialSummary& summary) {
    ordered_json j;
    j["trials"] = summary.trials;
    j["successes"] = summary.successes;
    j["successRate"] = summary.successRate;
    j["ciRadius99"] = summary.ciRadius99;
    j["meanTotalSize"] = summary.meanTotalSize;
    j["stdTotalSize"] = summary.stdTotalSize;
    j["meanMaxLevelSize"] = summary.meanMaxLevelSize;
    j["stdMaxLevelSize"] = summary.stdMaxLevelSize;
    j["meanZeroCount"] = summary.meanZeroCount;
    j["meanZeroCountSquared"] = summary.meanZeroCountSquared;
    j["seed"] = summary.seed;
    return j;
}

ordered_json toJson(const RunTrace& trace) {
    ordered_json j;
    j["levelListSizes"] = trace.levelListSizes;
    j["totalSize"] = trace.totalSize;
    j["maxLevelSize"] = trace.maxLevelSize;
    j["success"] = trace.success;
    j["zeroCount"] = trace.zeroCount;
    if (trace.success)
        j["solutionIndices"] = trace.solutionIndices;
    else
        j["solutionIndices"] = nullptr;
    j["reducedAllLevels"] = trace.reducedAllLevels;
    return j;
}

ordered_json toJson(const SweepRow& row) {
    ordered_json j;
    j["n"] = row.n;
    j["c"] = row.c;
    j["prob"] = toJson(row.prob);
    j["size"] = toJson(row.size);
    if (row.probAnalytic) j["probAnalytic"] = toJson(*row.probAnalytic);
    if (row.sizeAnalytic) j["sizeAnalytic"] = toJson(*row.sizeAnalytic);
    j["flags"] = toJson(row.prob.flags);
    if (row.empirical) j["empirical"] = toJson(*row.empirical);
    return j;
}

ordered_json toJson(const ComplexityRow& row) {
    ordered_json j;
    j["k"] = row.k;
    j["reachable"] = row.reachable;
    if (row.reachable) {
        j["n"] = row.n;
        j["c"] = row.c;
        j["size"] = endpointJson(*row.size, row.size->rounding() == Rounding::Up ? "up" : "down");
    } else {
        j["bestN"] = row.bestN;
        j["bestValue"] = row.bestValue;
    }
    return j;
}

ordered_json paramsJson(const Int& m, unsigned long k, std::uint64_t n, Mode mode,
                        mpfr_prec_t precision) {
    ordered_json j;
    j["m"] = m.get_str();
    j["mCompact"] = magnitudeString(m);
    j["k"] = k;
    if (n) j["n"] = n;
    j["mode"] = mode == Mode::CenteredModSum ? "zm" : "int";
    j["precisionBits"] = static_cast<long>(precision);
    return j;
}

ordered_json record(const std::string& command, ordered_json params, ordered_json results) {
    ordered_json j;
    j["schemaVersion"] = 1;
    j["command"] = command;
    j["params"] = std::move(params);
    j["results"] = std::move(results);
    return j;
}

const char* const kSweepCsvHeader =
    "n,c,prob_lb,prob_ub,prob_analytic_lb,prob_analytic_ub,size_lb,size_ub,"
    "emp_rate,emp_ci99,emp_total_size_mean,emp_total_size_std,emp_max_level_mean";

std::string sweepCsv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kSweepCsvHeader << "\n";
    for (const SweepRow& row : rows) {
        os << row.n << "," << doubleString(row.c) << ",";
        os << row.prob.lower.toDecimalString() << "," << row.prob.upper.toDecimalString() << ",";
        if (row.probAnalytic)
            os << row.probAnalytic->lower.toDecimalString() << ","
               << row.probAnalytic->upper.toDecimalString() << ",";
        else
            os << ",,";
        os << row.size.lower.toDecimalString() << "," << row.size.upper.toDecimalString() << ",";
        if (row.empirical) {
            const TrialSummary& e = *row.empirical;
            os << doubleString(e.successRate) << "," << doubleString(e.ciRadius99) << ","
               << doubleString(e.meanTotalSize) << "," << doubleString(e.stdTotalSize) << ","
               << doubleString(e.meanMaxLevelSize);
        } else {
            os << ",,,,";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace ktree::output
