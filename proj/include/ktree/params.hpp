#pragma once

#include <optional>
#include <vector>

#include "ktree/common.hpp"
#include "ktree/prec_real.hpp"

namespace ktree {

enum class Mode { IntegerSum, CenteredModSum };

struct ProblemParams {
    Int m;
    unsigned long k = 4;
    unsigned long n = 1;
    Mode mode = Mode::IntegerSum;
    mpfr_prec_t precisionBits = kDefaultPrecisionBits;

    unsigned logK() const { return checkedLogK(Int(k)); }
    void validate() const;
};

// Hypotheses of the closed-form success/complexity bounds, each decided by
// an outward-rounded comparison so a flag is true only when the inequality
// provably holds.
struct HypothesisFlags {
    bool kGe4 = false;
    bool mGt30Pow = false;     // m > 30^(log k + 1)
    bool pLt1over30 = false;   // p < 1/30
    bool mpLogKGt30 = false;   // m * p^(log k) > 30
    bool mGt7k = false;        // m > 7k
    bool pkCond = false;       // p * k > (7/m)^(k/2 - 1)

    bool allTrue() const {
        return kGe4 && mGt30Pow && pLt1over30 && mpLogKGt30 && mGt7k && pkCond;
    }
};

// The centered integer interval of real-valued size s > 0:
// {-floor(s/2), ..., floor(s/2)}, cardinality 2*floor(s/2)+1.
struct RangeSpec {
    PrecReal s;
    Int floorHalf;
    Int cardinality;
    // Present when s is known exactly; keeps sub-range floors exact.
    std::optional<ExactRational> exactS;

    static RangeSpec fromInteger(const Int& v, mpfr_prec_t prec = kDefaultPrecisionBits);
    static RangeSpec fromRational(const ExactRational& q, mpfr_prec_t prec = kDefaultPrecisionBits);
    // Floors taken on the PrecReal value with snap-to-integer semantics on
    // knife edges (see PrecReal::snapFloor).
    static RangeSpec fromReal(const PrecReal& s);
};

// Range of size s*p inside r. Exact when both r and p are exact.
RangeSpec subRangeOf(const RangeSpec& r, const ExactRational& p);
RangeSpec subRangeOf(const RangeSpec& r, const PrecReal& p);

// p = m^(-1/(log2 k + 1)), the filtering parameter.
PrecReal filterParam(const Int& m, unsigned long k, mpfr_prec_t prec = kDefaultPrecisionBits,
                     Rounding dir = Rounding::Nearest);

// s_d = m * p^d.
PrecReal levelRange(const Int& m, const PrecReal& p, unsigned d);

// 2*floor(s/2)+1 for s >= 1.
Int rangeCardinality(const PrecReal& s);

HypothesisFlags hypothesisCheck(const Int& m, unsigned long k,
                                mpfr_prec_t prec = kDefaultPrecisionBits);

// Per-level ranges <m*p^d> for d = 0..log k, with provably correct floors:
// exact integer ranges are detected via perfect-power tests, all other
// floors are certified by recomputation at doubled precision when the value
// lands too close to an integer.
class LevelRanges {
public:
    LevelRanges(const Int& m, unsigned long k, mpfr_prec_t prec = kDefaultPrecisionBits);

    const RangeSpec& at(unsigned d) const;
    unsigned logK() const { return logK_; }
    const Int& m() const { return m_; }
    unsigned long k() const { return k_; }
    mpfr_prec_t precision() const { return prec_; }
    const PrecReal& p() const { return p_; }
    // Merge threshold at level d: tau_d = floor(m * p^d / 2).
    const Int& tau(unsigned d) const { return at(d).floorHalf; }

private:
    Int m_;
    unsigned long k_;
    unsigned logK_;
    mpfr_prec_t prec_;
    PrecReal p_;
    std::vector<RangeSpec> ranges_;
};

// Accepts a decimal string or "2^b" shorthand.
Int parseMagnitude(const std::string& text);

}  // namespace ktree
