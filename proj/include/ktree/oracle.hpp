#pragma once

#include <vector>

#include "ktree/common.hpp"
#include "ktree/params.hpp"
#include "ktree/solver.hpp"

namespace ktree::oracle {

// Enumeration oracles are guarded to ranges of size <= 400.
inline constexpr long kMaxBruteRange = 400;

// Histogram of x+y over <s>^2, built by a literal double loop.
// counts[z + 2*floorHalf] = #{(x,y) : x+y = z}.
struct SumHistogram {
    Int floorHalf;
    std::vector<unsigned long> counts;  // index 0 corresponds to z = -2*floorHalf
    Int total;                          // cardinality^2

    unsigned long countAt(const Int& z) const;
};
SumHistogram sumHistogram(const RangeSpec& r);

ExactRational probSumToZBrute(const RangeSpec& r, const Int& z);
ExactRational probSumInRangeBrute(const RangeSpec& r, const RangeSpec& sub);
ExactRational mrDistFromUnifBrute(const RangeSpec& r, const RangeSpec& sub);
ExactRational probSumWithTwoRVInRangeBrute(const RangeSpec& r, const RangeSpec& sub);
ExactRational mrDistFromPairUnifBrute(const RangeSpec& r, const RangeSpec& sub);
ExactRational probSumModInRangeBrute(const Int& m, const RangeSpec& sub);

// Unfactored triple loops over <s>^3; cubic cost, for cross-checking the
// w-counting oracles above at small s.
ExactRational probSumWithTwoRVInRangeLiteral(const RangeSpec& r, const RangeSpec& sub);
ExactRational mrDistFromPairUnifLiteral(const RangeSpec& r, const RangeSpec& sub);

// Exact truncated-convolution chain for the k-Tree filters. f_0 is the pmf
// of one uniform draw on <m>; f_{d+1} is the self-convolution of f_d
// truncated (not renormalized) to <m*p^{d+1}>. Then the expected zero count
// is n^k * tupleZeroProb and the expected size of one level-d list is
// n^(2^d) * levelPassProb[d].
struct ConvolutionExpectation {
    ExactRational tupleZeroProb;              // f_{log k}(0)
    std::vector<ExactRational> levelPassProb;  // total mass of f_d, d = 0..log k
};
ConvolutionExpectation convolutionExpectation(const LevelRanges& levels);
// General chain: ranges[0] is the leaf range, later entries the successive
// truncation windows; 2^(ranges.size()-1) leaves.
ConvolutionExpectation convolutionExpectation(const std::vector<RangeSpec>& ranges);

// E[C] and E[Lambda] assembled from the convolution chain.
ExactRational expectedZeroCount(const ConvolutionExpectation& conv, unsigned long n,
                                unsigned long k);
ExactRational expectedTotalSize(const ConvolutionExpectation& conv, unsigned long n,
                                unsigned long k);

// Full 4-tuple enumeration over <m>^4 with every level filter evaluated;
// cross-checks the convolution chain at small m. Returns the probability
// that a single tuple passes all filters and sums to zero, plus the pass
// probabilities of levels 1 and 2.
struct FourTupleEnumeration {
    ExactRational tupleZeroProb;
    ExactRational level1PassProb;
    ExactRational level2PassProb;
};
FourTupleEnumeration enumerateFourTuples(const LevelRanges& levels);

// Zero count by direct evaluation of every index tuple (with subtree
// pruning, which cannot change the count). Guarded to n^k <= 10^8.
std::uint64_t naiveZeroCount(const InputLists& lists, const ProblemParams& params);

// Quadratic reference merge with the same contract as solver merge.
std::vector<ElementRecord> naiveMerge(const std::vector<ElementRecord>& la,
                                      const std::vector<ElementRecord>& lb, const Int& tau,
                                      MergeMode mode = MergeMode::Plain, const Int& modulus = 0);

}  // namespace ktree::oracle
