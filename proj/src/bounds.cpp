#include "ktree/bounds.hpp"

namespace ktree {

BoundPair::BoundPair(PrecReal lo, PrecReal up, HypothesisFlags f)
    : lower(std::move(lo)), upper(std::move(up)), flags(f) {
    if (lower > upper) throw std::logic_error("bound pair violates lower <= upper");
}

BoundsEngine::BoundsEngine(const Int& m, unsigned long k, Mode mode, mpfr_prec_t prec)
    : m_(m), k_(k), logK_(checkedLogK(Int(k))), mode_(mode), prec_(prec),
      levels_(m, k, prec), flags_(hypothesisCheck(m, k, prec)) {
    if (mode_ == Mode::CenteredModSum && mpz_even_p(m_.get_mpz_t()))
        throw ParamError("m must be odd in centered mod-m mode");

    for (unsigned d = 0; d < logK_; ++d) {
        const RangeSpec& r = levels_.at(d);
        const RangeSpec& sub = levels_.at(d + 1);
        if (mode_ == Mode::CenteredModSum && d == 0) {
            // First merge level over Z_m: the centered modular sum of two
            // uniforms is uniform, so the conditioned distribution is exact
            // and both MR distances collapse to 1.
            ExactRational pm = exactprob::probSumModInRange(m_, sub);
            sumProb_.push_back(pm);
            mrDist_.push_back(ExactRational(1));
            pairProb_.push_back(ExactRational(pm * pm));
            mrPair_.push_back(ExactRational(1));
        } else {
            sumProb_.push_back(exactprob::probSumInRange(r, sub));
            mrDist_.push_back(exactprob::mrDistFromUnif(r, sub));
            pairProb_.push_back(exactprob::probSumWithTwoRVInRange(r, sub));
            mrPair_.push_back(exactprob::mrDistFromPairUnif(r, sub));
        }
        pUp_.push_back(PrecReal::fromRational(sumProb_[d], prec_, Rounding::Up));
        pDn_.push_back(PrecReal::fromRational(sumProb_[d], prec_, Rounding::Down));
        mUp_.push_back(PrecReal::fromRational(mrDist_[d], prec_, Rounding::Up));
        momentAUp_.push_back(
            PrecReal::fromRational(ExactRational(sumProb_[d] * mrDist_[d]), prec_, Rounding::Up));
        momentBUp_.push_back(
            PrecReal::fromRational(ExactRational(pairProb_[d] * mrPair_[d]), prec_, Rounding::Up));
    }
    ExactRational base = makeRational(1, levels_.at(logK_).cardinality);
    baseUp_ = PrecReal::fromRational(base, prec_, Rounding::Up);
    baseDn_ = PrecReal::fromRational(base, prec_, Rounding::Down);
}

BoundPair BoundsEngine::firstMomentInductFactors(unsigned d) const {
    if (d >= logK_) throw DomainError("level index out of range");
    Int e = Int(k_) >> (d + 1);
    PrecReal alphaUp = pow(pUp_[d], e, Rounding::Up);
    PrecReal alphaDn = pow(pDn_[d], e, Rounding::Down);
    PrecReal betaUp = pow(mUp_[d], e, Rounding::Up);
    PrecReal up = mul(alphaUp, betaUp, Rounding::Up);
    PrecReal lo = div(alphaDn, betaUp, Rounding::Down);
    return BoundPair(std::move(lo), std::move(up), flags_);
}

BoundPair BoundsEngine::firstMomentBounds(const Int& n) const {
    if (n < 1) throw ParamError("n must be >= 1");
    PrecReal nkUp = pow(PrecReal::fromInteger(n, prec_, Rounding::Up), Int(k_), Rounding::Up);
    PrecReal nkDn = pow(PrecReal::fromInteger(n, prec_, Rounding::Down), Int(k_), Rounding::Down);
    PrecReal up = mul(nkUp, baseUp_, Rounding::Up);
    PrecReal lo = mul(nkDn, baseDn_, Rounding::Down);
    for (unsigned d = 0; d < logK_; ++d) {
        BoundPair f = firstMomentInductFactors(d);
        up = mul(up, f.upper, Rounding::Up);
        lo = mul(lo, f.lower, Rounding::Down);
    }
    return BoundPair(std::move(lo), std::move(up), flags_);
}

PrecReal BoundsEngine::secondMomentRecursion(const PrecReal& n) const {
    // f(m, k, n, p) <= f(m*p, k/2, sqrt((A n^2)^2 + 2 B n^3), p) with the
    // base case f(s, 1, n, p) = (n*u)(n*u + 1), u the point mass at 0 of
    // the final range. Everything rounds up.
    PrecReal cur = n;
    PrecReal two = PrecReal::fromUnsigned(2, prec_, Rounding::Up);
    for (unsigned d = 0; d < logK_; ++d) {
        PrecReal an2 = mul(momentAUp_[d], pow(cur, 2ul, Rounding::Up), Rounding::Up);
        PrecReal term1 = pow(an2, 2ul, Rounding::Up);
        PrecReal term2 = mul(mul(two, momentBUp_[d], Rounding::Up), pow(cur, 3ul, Rounding::Up),
                             Rounding::Up);
        cur = sqrt(add(term1, term2, Rounding::Up), Rounding::Up);
    }
    PrecReal nu = mul(cur, baseUp_, Rounding::Up);
    return mul(nu, add(nu, PrecReal::one(prec_), Rounding::Up), Rounding::Up);
}

PrecReal BoundsEngine::secondMomentClosedForm(const PrecReal& n) const {
    if (!(flags_.mpLogKGt30 && flags_.pLt1over30))
        throw DomainError("closed-form second moment requires m p^(log k) > 30 and p < 1/30");
    if (mode_ == Mode::CenteredModSum)
        throw DomainError("closed-form second moment covers the integer mode only");
    PrecReal one = PrecReal::one(prec_);
    PrecReal pUp = PrecReal::integerPowRatio(m_, -1, logK_ + 1, prec_, Rounding::Up);
    // mu = p * (1-p)^-1 * (1 + 35/(m p^(log k))); m p^(log k) = 1/p.
    PrecReal muUp = mul(pUp, recip(sub(one, pUp, Rounding::Down), Rounding::Up), Rounding::Up);
    muUp = mul(muUp,
               add(one, mul(PrecReal::fromUnsigned(35, prec_, Rounding::Up), pUp, Rounding::Up),
                   Rounding::Up),
               Rounding::Up);
    // nu = 1/(m p^(log k + 1)) = 1 exactly for the canonical filter parameter.
    PrecReal t = mul(n, muUp, Rounding::Up);
    PrecReal twoMu = mul(PrecReal::fromUnsigned(2, prec_, Rounding::Up), muUp, Rounding::Up);
    for (unsigned d = 0; d < logK_; ++d)
        t = mul(t, add(t, twoMu, Rounding::Up), Rounding::Up);
    PrecReal lead = mul(pow(n, Int(k_), Rounding::Up), pow(muUp, Int(k_), Rounding::Up),
                        Rounding::Up);
    return mul(lead, add(one, t, Rounding::Up), Rounding::Up);
}

PrecReal BoundsEngine::secondMomentUpperBound(const PrecReal& n) const {
    PrecReal bound = secondMomentRecursion(n);
    if (flags_.mpLogKGt30 && flags_.pLt1over30 && mode_ == Mode::IntegerSum)
        bound = min(bound, secondMomentClosedForm(n));
    return bound;
}

MomentEstimate BoundsEngine::momentEstimate(const Int& n) const {
    MomentEstimate est;
    est.firstMoment = firstMomentBounds(n);
    est.secondMomentUB = secondMomentUpperBound(PrecReal::fromInteger(n, prec_, Rounding::Up));
    return est;
}

BoundPair BoundsEngine::probBounds(const Int& n) const {
    MomentEstimate est = momentEstimate(n);
    PrecReal up = min(est.firstMoment.upper, PrecReal::one(prec_));
    PrecReal lo = div(pow(est.firstMoment.lower, 2ul, Rounding::Down), est.secondMomentUB,
                      Rounding::Down);
    // Structural guarantees: E[C^2] >= E[C]^2 makes LB <= 1, and
    // E[C^2] >= E[C] (integer-valued C) makes LB <= the Markov bound.
    return BoundPair(std::move(lo), std::move(up), flags_);
}

BoundPair BoundsEngine::sizeBounds(const Int& n) const {
    if (n < 1) throw ParamError("n must be >= 1");
    Int kn = Int(k_) * n;
    PrecReal up = PrecReal::fromInteger(kn, prec_, Rounding::Up);
    PrecReal lo = PrecReal::fromInteger(kn, prec_, Rounding::Down);
    if (logK_ >= 1) {
        Int coef = (Int(k_) >> 1) * n * n;
        up = add(up, mul(PrecReal::fromInteger(coef, prec_, Rounding::Up), pUp_[0], Rounding::Up),
                 Rounding::Up);
        lo = add(lo, mul(PrecReal::fromInteger(coef, prec_, Rounding::Down), pDn_[0], Rounding::Down),
                 Rounding::Down);
    }
    for (unsigned d = 2; d <= logK_; ++d) {
        PrecReal gammaUp = pUp_[d - 1];
        PrecReal gammaDn = pDn_[d - 1];
        for (unsigned t = 0; t + 2 <= d; ++t) {
            Int e = Int(1) << (d - t - 1);
            PrecReal fUp = mul(pow(pUp_[t], e, Rounding::Up), pow(mUp_[t], e, Rounding::Up),
                               Rounding::Up);
            PrecReal fDn = div(pow(pDn_[t], e, Rounding::Down), pow(mUp_[t], e, Rounding::Up),
                               Rounding::Down);
            gammaUp = mul(gammaUp, fUp, Rounding::Up);
            gammaDn = mul(gammaDn, fDn, Rounding::Down);
        }
        Int lists = Int(k_) >> d;
        Int e = Int(1) << d;
        PrecReal termUp =
            mul(mul(PrecReal::fromInteger(lists, prec_, Rounding::Up),
                    pow(PrecReal::fromInteger(n, prec_, Rounding::Up), e, Rounding::Up),
                    Rounding::Up),
                gammaUp, Rounding::Up);
        PrecReal termDn =
            mul(mul(PrecReal::fromInteger(lists, prec_, Rounding::Down),
                    pow(PrecReal::fromInteger(n, prec_, Rounding::Down), e, Rounding::Down),
                    Rounding::Down),
                gammaDn, Rounding::Down);
        up = add(up, termUp, Rounding::Up);
        lo = add(lo, termDn, Rounding::Down);
    }
    return BoundPair(std::move(lo), std::move(up), flags_);
}

PrecReal secondMomentUpperBound(const Int& m, unsigned long k, const PrecReal& n, Mode mode,
                                mpfr_prec_t prec) {
    if (k == 1) {
        PrecReal u = PrecReal::fromRational(makeRational(1, 2 * Int(m / 2) + 1), prec,
                                            Rounding::Up);
        PrecReal nu = mul(n, u, Rounding::Up);
        return mul(nu, add(nu, PrecReal::one(prec), Rounding::Up), Rounding::Up);
    }
    return BoundsEngine(m, k, mode, prec).secondMomentUpperBound(n);
}

BoundPair analyticProbBounds(const Int& m, unsigned long k, const Int& n, mpfr_prec_t prec) {
    unsigned logK = checkedLogK(Int(k));
    if (k < 4) throw ParamError("analytic bounds require k >= 4");
    if (n < 1) throw ParamError("n must be >= 1");
    HypothesisFlags flags = hypothesisCheck(m, k, prec);
    PrecReal one = PrecReal::one(prec);

    PrecReal pUp = PrecReal::integerPowRatio(m, -1, logK + 1, prec, Rounding::Up);
    PrecReal pDn = PrecReal::integerPowRatio(m, -1, logK + 1, prec, Rounding::Down);
    PrecReal nUp = PrecReal::fromInteger(n, prec, Rounding::Up);
    PrecReal nDn = PrecReal::fromInteger(n, prec, Rounding::Down);
    PrecReal cUp = mul(nUp, pUp, Rounding::Up);
    PrecReal cDn = mul(nDn, pDn, Rounding::Down);

    // UB = c^k (1 + 37 p)^k, clamped to 1.
    PrecReal thirtySevenP =
        mul(PrecReal::fromUnsigned(37, prec, Rounding::Up), pUp, Rounding::Up);
    PrecReal ub = mul(pow(cUp, Int(k), Rounding::Up),
                      pow(add(one, thirtySevenP, Rounding::Up), Int(k), Rounding::Up),
                      Rounding::Up);
    ub = min(ub, one);

    // LB = (1 - 150 p)^k / (c^-k + (1 + k/n)^k), clamped to 0.
    PrecReal cInvK = recip(pow(cDn, Int(k), Rounding::Down), Rounding::Up);
    PrecReal kOverN = PrecReal::fromRational(makeRational(Int(k), n), prec, Rounding::Up);
    PrecReal denom = add(cInvK, pow(add(one, kOverN, Rounding::Up), Int(k), Rounding::Up),
                         Rounding::Up);
    PrecReal hundredFiftyP =
        mul(PrecReal::fromUnsigned(150, prec, Rounding::Up), pUp, Rounding::Up);
    PrecReal slack = pow(sub(one, hundredFiftyP, Rounding::Down), Int(k), Rounding::Down);
    PrecReal lb = mul(recip(denom, Rounding::Down), slack, Rounding::Down);

    return BoundPair(std::move(lb), std::move(ub), flags);
}

BoundPair analyticSizeBounds(const Int& m, unsigned long k, const Int& n, mpfr_prec_t prec) {
    unsigned logK = checkedLogK(Int(k));
    if (k < 4) throw ParamError("analytic bounds require k >= 4");
    if (n < 1) throw ParamError("n must be >= 1");
    HypothesisFlags flags = hypothesisCheck(m, k, prec);
    PrecReal one = PrecReal::one(prec);

    PrecReal pUp = PrecReal::integerPowRatio(m, -1, logK + 1, prec, Rounding::Up);
    PrecReal pDn = PrecReal::integerPowRatio(m, -1, logK + 1, prec, Rounding::Down);
    PrecReal cUp = mul(PrecReal::fromInteger(n, prec, Rounding::Up), pUp, Rounding::Up);
    PrecReal cDn = mul(PrecReal::fromInteger(n, prec, Rounding::Down), pDn, Rounding::Down);

    // 1 + sum over d of c^(2^d - 1) / 2^d.
    PrecReal sumUp = one, sumDn = one;
    for (unsigned d = 1; d <= logK; ++d) {
        Int e = (Int(1) << d) - 1;
        ExactRational invPow2 = makeRational(1, Int(1) << d);
        PrecReal invUp = PrecReal::fromRational(invPow2, prec, Rounding::Up);
        PrecReal invDn = PrecReal::fromRational(invPow2, prec, Rounding::Down);
        sumUp = add(sumUp, mul(pow(cUp, e, Rounding::Up), invUp, Rounding::Up), Rounding::Up);
        sumDn = add(sumDn, mul(pow(cDn, e, Rounding::Down), invDn, Rounding::Down),
                    Rounding::Down);
    }

    Int kn = Int(k) * n;
    PrecReal thirtySevenP =
        mul(PrecReal::fromUnsigned(37, prec, Rounding::Up), pUp, Rounding::Up);
    PrecReal ub = mul(mul(PrecReal::fromInteger(kn, prec, Rounding::Up), sumUp, Rounding::Up),
                      pow(add(one, thirtySevenP, Rounding::Up), Int(k - 1), Rounding::Up),
                      Rounding::Up);
    PrecReal lb = mul(mul(PrecReal::fromInteger(kn, prec, Rounding::Down), sumDn, Rounding::Down),
                      pow(sub(one, thirtySevenP, Rounding::Down), Int(k - 1), Rounding::Down),
                      Rounding::Down);
    return BoundPair(std::move(lb), std::move(ub), flags);
}

ProbSizeBounds zmBounds(const Int& m, unsigned long k, const Int& n, mpfr_prec_t prec) {
    BoundsEngine engine(m, k, Mode::CenteredModSum, prec);
    return {engine.probBounds(n), engine.sizeBounds(n)};
}

}  // namespace ktree
