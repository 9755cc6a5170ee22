#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ktree/common.hpp"
#include "ktree/params.hpp"

namespace ktree {

// One list element with provenance: indices into the two child lists that
// produced it (for level 0, leftIndex is the position in the input list).
struct ElementRecord {
    Int value;
    std::uint64_t leftIndex = 0;
    std::uint64_t rightIndex = 0;

    bool operator==(const ElementRecord& o) const {
        return value == o.value && leftIndex == o.leftIndex && rightIndex == o.rightIndex;
    }
};

struct InputLists {
    Int m;
    unsigned long k = 0;
    unsigned long n = 0;
    Mode mode = Mode::IntegerSum;
    std::uint64_t seed = 0;
    std::vector<std::vector<Int>> lists;
};

struct RunTrace {
    std::vector<std::vector<std::uint64_t>> levelListSizes;  // [d][i], d = 0..log k
    std::uint64_t totalSize = 0;
    std::uint64_t maxLevelSize = 0;
    bool success = false;
    std::uint64_t zeroCount = 0;
    std::vector<std::uint64_t> solutionIndices;  // k leaf indices, 1-based; empty on failure
    // Centered reduction applied beyond level 1 (mod mode with p >= 1/2).
    bool reducedAllLevels = false;
};

struct SolverLimits {
    std::uint64_t maxTotalElements = std::uint64_t(1) << 31;
    // Test hook: use the arbitrary-magnitude value path even when the
    // modulus fits machine words.
    bool forceWideValues = false;
};

// k*n values i.i.d. uniform on <m>, by rejection from a seeded uniform bit
// source. Deterministic given (params, seed).
InputLists generateLists(const ProblemParams& params, std::uint64_t seed);

RunTrace runKTree(const ProblemParams& params, const InputLists& lists,
                  const SolverLimits& limits = {});

// True iff the leaf values selected by `indices` (1-based) pass every level
// threshold and sum to zero, with the same reduction rules as runKTree.
bool verifySolution(const InputLists& lists, const std::vector<std::uint64_t>& indices,
                    const ProblemParams& params);

enum class MergeMode { Plain, CenteredMod };

// All pairwise sums with |a (+) b| <= tau, duplicates preserved, output in
// canonical order (value, then left index, then right index). CenteredMod
// reduces each sum into [-(m-1)/2, (m-1)/2] before the threshold test.
std::vector<ElementRecord> merge(const std::vector<ElementRecord>& la,
                                 const std::vector<ElementRecord>& lb, const Int& tau,
                                 MergeMode mode = MergeMode::Plain, const Int& modulus = 0);

// Binary debug dumps (little-endian, versioned "KTRE"/"KTRT" headers).
void dumpInputLists(const InputLists& in, std::ostream& os);
InputLists loadInputLists(std::istream& is);
void dumpRunTrace(const RunTrace& trace, std::ostream& os);
RunTrace loadRunTrace(std::istream& is);

}  // namespace ktree
