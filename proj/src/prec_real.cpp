#include "ktree/prec_real.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ktree {

namespace {

mpfr_rnd_t rnd(Rounding dir) {
    switch (dir) {
        case Rounding::Down: return MPFR_RNDD;
        case Rounding::Up: return MPFR_RNDU;
        default: return MPFR_RNDN;
    }
}

// Direction for an intermediate whose contribution to the final value is
// monotonically decreasing (divisors, negated exponents, subtrahends).
Rounding flip(Rounding dir) {
    switch (dir) {
        case Rounding::Down: return Rounding::Up;
        case Rounding::Up: return Rounding::Down;
        default: return Rounding::Nearest;
    }
}

}  // namespace

unsigned checkedLogK(const Int& k) {
    if (k < 2) throw ParamError("k must be a power of 2 and >= 2");
    size_t bit = mpz_scan1(k.get_mpz_t(), 0);
    if (mpz_sizeinbase(k.get_mpz_t(), 2) != bit + 1)
        throw ParamError("k must be a power of 2, got " + k.get_str());
    return static_cast<unsigned>(bit);
}

PrecReal::PrecReal() : PrecReal(kDefaultPrecisionBits) {}

PrecReal::PrecReal(mpfr_prec_t prec) : is_zero_(true), dir_(Rounding::Nearest), prec_(prec) {
    if (prec < MPFR_PREC_MIN) throw ParamError("precision too small");
    mpfr_init2(log_, prec);
    mpfr_set_zero(log_, 1);
}

PrecReal::PrecReal(const PrecReal& other)
    : is_zero_(other.is_zero_), dir_(other.dir_), prec_(other.prec_) {
    mpfr_init2(log_, prec_);
    mpfr_set(log_, other.log_, MPFR_RNDN);
}

PrecReal::PrecReal(PrecReal&& other) noexcept
    : is_zero_(other.is_zero_), dir_(other.dir_), prec_(other.prec_) {
    mpfr_init2(log_, MPFR_PREC_MIN);
    mpfr_swap(log_, other.log_);
}

PrecReal& PrecReal::operator=(const PrecReal& other) {
    if (this != &other) {
        mpfr_set_prec(log_, other.prec_);
        mpfr_set(log_, other.log_, MPFR_RNDN);
        is_zero_ = other.is_zero_;
        dir_ = other.dir_;
        prec_ = other.prec_;
    }
    return *this;
}

PrecReal& PrecReal::operator=(PrecReal&& other) noexcept {
    if (this != &other) {
        mpfr_swap(log_, other.log_);
        is_zero_ = other.is_zero_;
        dir_ = other.dir_;
        prec_ = other.prec_;
    }
    return *this;
}

PrecReal::~PrecReal() { mpfr_clear(log_); }

PrecReal PrecReal::zero(mpfr_prec_t prec) { return PrecReal(prec); }

PrecReal PrecReal::one(mpfr_prec_t prec) {
    PrecReal r(prec);
    r.is_zero_ = false;
    mpfr_set_zero(r.log_, 1);
    return r;
}

PrecReal PrecReal::fromInteger(const Int& v, mpfr_prec_t prec, Rounding dir) {
    if (v < 0) throw DomainError("PrecReal represents nonnegative reals");
    if (v == 0) return zero(prec);
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_t t;
    mpfr_init2(t, prec + 64);
    mpfr_set_z(t, v.get_mpz_t(), rnd(dir));
    mpfr_log(r.log_, t, rnd(dir));
    mpfr_clear(t);
    return r;
}

PrecReal PrecReal::fromUnsigned(unsigned long v, mpfr_prec_t prec, Rounding dir) {
    return fromInteger(Int(v), prec, dir);
}

PrecReal PrecReal::fromRational(const ExactRational& q, mpfr_prec_t prec, Rounding dir) {
    if (q < 0) throw DomainError("PrecReal represents nonnegative reals");
    if (q == 0) return zero(prec);
    PrecReal num = fromInteger(Int(q.get_num()), prec, dir);
    PrecReal den = fromInteger(Int(q.get_den()), prec, flip(dir));
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_sub(r.log_, num.log_, den.log_, rnd(dir));
    return r;
}

PrecReal PrecReal::fromDouble(double v, mpfr_prec_t prec, Rounding dir) {
    if (v < 0) throw DomainError("PrecReal represents nonnegative reals");
    if (v == 0) return zero(prec);
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_set_d(t, v, rnd(dir));
    mpfr_log(r.log_, t, rnd(dir));
    mpfr_clear(t);
    return r;
}

PrecReal PrecReal::integerPowRatio(const Int& base, long num, unsigned long den,
                                   mpfr_prec_t prec, Rounding dir) {
    if (base < 1) throw DomainError("integerPowRatio requires base >= 1");
    if (den == 0) throw DomainError("integerPowRatio requires den >= 1");
    // log(base) >= 0; a negative exponent flips the direction it must carry.
    Rounding logDir = num >= 0 ? dir : flip(dir);
    PrecReal lb = fromInteger(base, prec, logDir);
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_mul_si(r.log_, lb.log_, num, rnd(dir));
    mpfr_div_ui(r.log_, r.log_, den, rnd(dir));
    return r;
}

double PrecReal::logValue() const {
    if (is_zero_) throw DomainError("log of zero");
    return mpfr_get_d(log_, MPFR_RNDN);
}

double PrecReal::log2Value() const {
    if (is_zero_) throw DomainError("log2 of zero");
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_const_log2(t, MPFR_RNDN);
    mpfr_div(t, log_, t, MPFR_RNDN);
    double v = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return v;
}

double PrecReal::toDouble() const {
    if (is_zero_) return 0.0;
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_exp(t, log_, MPFR_RNDN);
    double v = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return v;
}

std::string PrecReal::toDecimalString(size_t digits) const {
    if (is_zero_) return "0";
    if (digits == 0) digits = static_cast<size_t>(static_cast<double>(prec_) / 3.32) + 2;
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_exp(t, log_, MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Re", static_cast<int>(digits - 1), t);
    std::string out(s);
    mpfr_free_str(s);
    mpfr_clear(t);
    return out;
}

int PrecReal::compareTo(const PrecReal& other) const {
    if (is_zero_ && other.is_zero_) return 0;
    if (is_zero_) return -1;
    if (other.is_zero_) return 1;
    return mpfr_cmp(log_, other.log_);
}

PrecReal mul(const PrecReal& a, const PrecReal& b, Rounding dir) {
    mpfr_prec_t prec = std::max(a.prec_, b.prec_);
    if (a.is_zero_ || b.is_zero_) return PrecReal::zero(prec);
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_add(r.log_, a.log_, b.log_, rnd(dir));
    return r;
}

PrecReal div(const PrecReal& a, const PrecReal& b, Rounding dir) {
    if (b.is_zero_) throw DomainError("division by zero PrecReal");
    mpfr_prec_t prec = std::max(a.prec_, b.prec_);
    if (a.is_zero_) return PrecReal::zero(prec);
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_sub(r.log_, a.log_, b.log_, rnd(dir));
    return r;
}

PrecReal add(const PrecReal& a, const PrecReal& b, Rounding dir) {
    mpfr_prec_t prec = std::max(a.prec_, b.prec_);
    if (a.is_zero_ && b.is_zero_) return PrecReal::zero(prec);
    const PrecReal& hi = (a.compareTo(b) >= 0) ? a : b;
    const PrecReal& lo = (&hi == &a) ? b : a;
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    if (lo.is_zero_) {
        mpfr_set(r.log_, hi.log_, rnd(dir));
        return r;
    }
    // log(hi + lo) = log(hi) + log1p(exp(log lo - log hi)); every step is
    // monotone increasing in its operand, so one direction serves throughout.
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_sub(t, lo.log_, hi.log_, rnd(dir));
    mpfr_exp(t, t, rnd(dir));
    mpfr_log1p(t, t, rnd(dir));
    mpfr_add(r.log_, hi.log_, t, rnd(dir));
    mpfr_clear(t);
    return r;
}

PrecReal sub(const PrecReal& a, const PrecReal& b, Rounding dir) {
    mpfr_prec_t prec = std::max(a.prec_, b.prec_);
    if (b.is_zero_) return a;
    if (a.compareTo(b) <= 0) return PrecReal::zero(prec);
    // log(a - b) = log(a) + log1p(-exp(log b - log a)). The inner exp must
    // round opposite to the requested direction: a larger exp makes the
    // result smaller.
    PrecReal r(prec);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_sub(t, b.log_, a.log_, rnd(flip(dir)));
    mpfr_exp(t, t, rnd(flip(dir)));
    mpfr_neg(t, t, MPFR_RNDN);  // exact
    if (mpfr_cmp_si(t, -1) <= 0) {
        // Rounded all the way to (or past) cancellation; saturate.
        mpfr_clear(t);
        return PrecReal::zero(prec);
    }
    mpfr_log1p(t, t, rnd(dir));
    mpfr_add(r.log_, a.log_, t, rnd(dir));
    mpfr_clear(t);
    return r;
}

PrecReal pow(const PrecReal& a, const Int& e, Rounding dir) {
    if (e < 0) throw DomainError("pow expects e >= 0; use recip/div for negative powers");
    if (e == 0) return PrecReal::one(a.prec_);
    if (a.is_zero_) return PrecReal::zero(a.prec_);
    PrecReal r(a.prec_);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_mul_z(r.log_, a.log_, e.get_mpz_t(), rnd(dir));
    return r;
}

PrecReal pow(const PrecReal& a, unsigned long e, Rounding dir) {
    return pow(a, Int(e), dir);
}

PrecReal sqrt(const PrecReal& a, Rounding dir) {
    if (a.is_zero_) return PrecReal::zero(a.prec_);
    PrecReal r(a.prec_);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_div_2ui(r.log_, a.log_, 1, rnd(dir));  // exact in binary
    return r;
}

PrecReal recip(const PrecReal& a, Rounding dir) {
    if (a.is_zero_) throw DomainError("reciprocal of zero PrecReal");
    PrecReal r(a.prec_);
    r.is_zero_ = false;
    r.dir_ = dir;
    mpfr_neg(r.log_, a.log_, MPFR_RNDN);  // exact
    return r;
}

const PrecReal& min(const PrecReal& a, const PrecReal& b) { return a.compareTo(b) <= 0 ? a : b; }
const PrecReal& max(const PrecReal& a, const PrecReal& b) { return a.compareTo(b) >= 0 ? a : b; }

Int PrecReal::snapFloor() const {
    if (is_zero_) return Int(0);
    mpfr_t v, nearest, diff, eps;
    mpfr_init2(v, prec_);
    mpfr_exp(v, log_, MPFR_RNDN);
    mpfr_init2(nearest, prec_);
    mpfr_round(nearest, v);
    mpfr_init2(diff, prec_);
    mpfr_sub(diff, v, nearest, MPFR_RNDN);
    mpfr_init2(eps, 64);
    mpfr_set_ui_2exp(eps, 1, -(prec_ / 2), MPFR_RNDN);
    if (mpfr_sgn(v) > 0) mpfr_mul(eps, eps, v, MPFR_RNDU);
    Int result;
    if (mpfr_cmpabs(diff, eps) <= 0) {
        mpfr_get_z(result.get_mpz_t(), nearest, MPFR_RNDN);
    } else {
        mpfr_floor(v, v);
        mpfr_get_z(result.get_mpz_t(), v, MPFR_RNDN);
    }
    mpfr_clears(v, nearest, diff, eps, static_cast<mpfr_ptr>(nullptr));
    if (result < 0) result = 0;
    return result;
}

std::optional<Int> PrecReal::tryFloor() const {
    if (is_zero_) return Int(0);
    if (mpfr_sgn(log_) < 0) {
        // Value in (0, 1); floor is 0 unless the value is indistinguishable
        // from 1 (log within 2^-(prec/2) of zero).
        mpfr_t bound;
        mpfr_init2(bound, 64);
        mpfr_set_ui_2exp(bound, 1, -(prec_ / 2), MPFR_RNDN);
        bool tooClose = mpfr_cmpabs(log_, bound) < 0;
        mpfr_clear(bound);
        if (tooClose) return std::nullopt;
        return Int(0);
    }
    mpfr_t v, fl, frac, eps;
    mpfr_init2(v, prec_);
    mpfr_exp(v, log_, MPFR_RNDN);
    mpfr_init2(fl, prec_);
    mpfr_floor(fl, v);
    mpfr_init2(frac, prec_);
    mpfr_sub(frac, v, fl, MPFR_RNDN);
    // Certify only when the fractional part is comfortably inside (0, 1)
    // relative to the value's own magnitude.
    mpfr_init2(eps, 64);
    mpfr_set_ui_2exp(eps, 1, -(prec_ / 2), MPFR_RNDN);
    mpfr_mul(eps, eps, v, MPFR_RNDU);
    bool nearBelow = mpfr_cmp(frac, eps) < 0;
    mpfr_t gap;
    mpfr_init2(gap, prec_);
    mpfr_ui_sub(gap, 1, frac, MPFR_RNDN);
    bool nearAbove = mpfr_cmp(gap, eps) < 0;
    std::optional<Int> result;
    if (!nearBelow && !nearAbove) {
        Int f;
        mpfr_get_z(f.get_mpz_t(), fl, MPFR_RNDN);
        result = f;
    }
    mpfr_clears(v, fl, frac, eps, gap, static_cast<mpfr_ptr>(nullptr));
    return result;
}

}  // namespace ktree
