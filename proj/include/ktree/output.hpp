#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ktree/bounds.hpp"
#include "ktree/harness.hpp"
#include "ktree/solver.hpp"

namespace ktree::output {

using nlohmann::ordered_json;

// "2^b" when m is an exact power of two, decimal otherwise.
std::string magnitudeString(const Int& m);

ordered_json endpointJson(const PrecReal& v, const char* rounding);
ordered_json toJson(const BoundPair& pair);
ordered_json toJson(const HypothesisFlags& flags);
ordered_json toJson(const TrialSummary& summary);
ordered_json toJson(const RunTrace& trace);
ordered_json toJson(const SweepRow& row);
ordered_json toJson(const ComplexityRow& row);

ordered_json paramsJson(const Int& m, unsigned long k, std::uint64_t n, Mode mode,
                        mpfr_prec_t precision);

// Envelope shared by every command.
ordered_json record(const std::string& command, ordered_json params, ordered_json results);

// Frozen sweep CSV layout.
extern const char* const kSweepCsvHeader;
std::string sweepCsv(const std::vector<SweepRow>& rows);

}  // namespace ktree::output
