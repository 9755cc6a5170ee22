#pragma once

#include <vector>

#include "ktree/common.hpp"
#include "ktree/exactprob.hpp"
#include "ktree/params.hpp"
#include "ktree/prec_real.hpp"

namespace ktree {

// Directed-rounded bracket: lower is computed rounding Down at every step,
// upper rounding Up, so floating error can never invalidate the bracket.
struct BoundPair {
    PrecReal lower;
    PrecReal upper;
    HypothesisFlags flags;

    BoundPair() = default;
    BoundPair(PrecReal lo, PrecReal up, HypothesisFlags f);
};

struct MomentEstimate {
    BoundPair firstMoment;      // brackets E[C]
    PrecReal secondMomentUB;    // >= E[C^2]
};

struct ProbSizeBounds {
    BoundPair prob;
    BoundPair size;
};

// Bound pipeline for fixed (m, k, mode): exact per-level primitives are
// computed once as rationals, converted to directed-rounded reals, and then
// reused across evaluations at different list sizes n.
class BoundsEngine {
public:
    BoundsEngine(const Int& m, unsigned long k, Mode mode = Mode::IntegerSum,
                 mpfr_prec_t prec = kDefaultPrecisionBits);

    // Per-level bracket factor: alpha = P(s_d, p)^(k/2^(d+1)) against the
    // MR inflation beta of the same power; (alpha/beta, alpha*beta).
    BoundPair firstMomentInductFactors(unsigned d) const;

    // Brackets E[C], the number of zeros in the root list, for n-entry lists.
    BoundPair firstMomentBounds(const Int& n) const;

    // Upper bound on E[C^2]; n is real-valued inside the recursion. Returns
    // the tighter of two proven bounds: the level recursion (always), and
    // the closed form (n^k mu^k nu)(1 + T_{mu,n,nu}(k)) when its hypotheses
    // (m p^(log k) > 30 and p < 1/30) provably hold. The recursion's
    // additive pair term inflates the diagonal at small c, where the closed
    // form stays tight; each alone is valid, so the min is too.
    PrecReal secondMomentUpperBound(const PrecReal& n) const;
    PrecReal secondMomentRecursion(const PrecReal& n) const;
    // Closed form; requires the hypothesis gate (throws DomainError outside).
    PrecReal secondMomentClosedForm(const PrecReal& n) const;

    // Markov upper bound and Paley-Zygmund lower bound on Pr[C >= 1].
    BoundPair probBounds(const Int& n) const;
    MomentEstimate momentEstimate(const Int& n) const;

    // Brackets the expected total size of all lists.
    BoundPair sizeBounds(const Int& n) const;

    const LevelRanges& levels() const { return levels_; }
    const HypothesisFlags& flags() const { return flags_; }
    Mode mode() const { return mode_; }
    mpfr_prec_t precision() const { return prec_; }

private:
    Int m_;
    unsigned long k_;
    unsigned logK_;
    Mode mode_;
    mpfr_prec_t prec_;
    LevelRanges levels_;
    HypothesisFlags flags_;

    // Exact per-level primitives, d = 0..log k - 1 (mod-mode substitutions
    // already applied at d = 0).
    std::vector<ExactRational> sumProb_;    // P(s_d, p)
    std::vector<ExactRational> mrDist_;     // MR(s_d, p); 1 at d=0 in mod mode
    std::vector<ExactRational> pairProb_;   // P3(s_d, p)
    std::vector<ExactRational> mrPair_;     // MR_pair(s_d, p); 1 at d=0 in mod mode

    // Directed conversions, cached.
    std::vector<PrecReal> pUp_, pDn_, mUp_;
    std::vector<PrecReal> momentAUp_;  // P * MR, rounded up
    std::vector<PrecReal> momentBUp_;  // P3 * MR_pair, rounded up
    PrecReal baseUp_, baseDn_;         // 1 / |<m p^(log k)>|
};

// Standalone entry covering the recursion base k = 1, where the bound is
// (n*u)(n*u + 1) with u the point mass of 0 in <m>; delegates to a
// BoundsEngine otherwise.
PrecReal secondMomentUpperBound(const Int& m, unsigned long k, const PrecReal& n,
                                Mode mode = Mode::IntegerSum,
                                mpfr_prec_t prec = kDefaultPrecisionBits);

// Closed-form bounds; k >= 4 required. The probability upper bound is
// clamped to 1 and the lower bound to 0 (the 1 - 150p prefactor can go
// negative outside the hypotheses; flags report validity).
BoundPair analyticProbBounds(const Int& m, unsigned long k, const Int& n,
                             mpfr_prec_t prec = kDefaultPrecisionBits);
BoundPair analyticSizeBounds(const Int& m, unsigned long k, const Int& n,
                             mpfr_prec_t prec = kDefaultPrecisionBits);

// Full pipeline over centered Z_m (odd m).
ProbSizeBounds zmBounds(const Int& m, unsigned long k, const Int& n,
                        mpfr_prec_t prec = kDefaultPrecisionBits);

}  // namespace ktree
