#pragma once

#include <optional>
#include <string>

#include <mpfr.h>

#include "ktree/common.hpp"

namespace ktree {

enum class Rounding { Down, Up, Nearest };

constexpr mpfr_prec_t kDefaultPrecisionBits = 192;

// Nonnegative real of essentially unbounded magnitude, stored as the natural
// log of its value (with an explicit zero). Quantities like n^k or p^k for
// k up to 2^20 overflow/underflow any fixed-width float, so products and
// powers are accumulated in the log domain and only exponentiated on output.
//
// Every operation takes an explicit rounding direction. Given exact inputs,
// a result requested with Rounding::Up is >= the exact real result and one
// with Rounding::Down is <= it; log(x) is increasing, so directed rounding
// of the stored log gives directed rounding of the value.
class PrecReal {
public:
    PrecReal();  // zero at default precision
    explicit PrecReal(mpfr_prec_t prec);
    PrecReal(const PrecReal& other);
    PrecReal(PrecReal&& other) noexcept;
    PrecReal& operator=(const PrecReal& other);
    PrecReal& operator=(PrecReal&& other) noexcept;
    ~PrecReal();

    static PrecReal zero(mpfr_prec_t prec = kDefaultPrecisionBits);
    static PrecReal one(mpfr_prec_t prec = kDefaultPrecisionBits);
    static PrecReal fromInteger(const Int& v, mpfr_prec_t prec, Rounding dir);
    static PrecReal fromUnsigned(unsigned long v, mpfr_prec_t prec, Rounding dir);
    static PrecReal fromRational(const ExactRational& q, mpfr_prec_t prec, Rounding dir);
    static PrecReal fromDouble(double v, mpfr_prec_t prec, Rounding dir);
    // base^(num/den) for integer base >= 1, den >= 1, any sign of num.
    static PrecReal integerPowRatio(const Int& base, long num, unsigned long den,
                                    mpfr_prec_t prec, Rounding dir);

    bool isZero() const { return is_zero_; }
    Rounding rounding() const { return dir_; }
    mpfr_prec_t precision() const { return prec_; }

    // Natural log and log2 of the value; requires non-zero.
    double logValue() const;
    double log2Value() const;
    // May overflow/underflow to inf/0; fine for display and heuristics.
    double toDouble() const;
    // Scientific-notation decimal with the given significant digits.
    std::string toDecimalString(size_t digits = 0) const;

    // Exact comparison of stored representations.
    int compareTo(const PrecReal& other) const;
    bool operator<(const PrecReal& o) const { return compareTo(o) < 0; }
    bool operator<=(const PrecReal& o) const { return compareTo(o) <= 0; }
    bool operator>(const PrecReal& o) const { return compareTo(o) > 0; }
    bool operator>=(const PrecReal& o) const { return compareTo(o) >= 0; }

    friend PrecReal mul(const PrecReal& a, const PrecReal& b, Rounding dir);
    friend PrecReal div(const PrecReal& a, const PrecReal& b, Rounding dir);
    friend PrecReal add(const PrecReal& a, const PrecReal& b, Rounding dir);
    // a - b, saturating at zero when a <= b. Callers use this only for
    // quantities whose exact value is known nonnegative (probabilities,
    // 1 - c*p prefactors with explicit clamping semantics).
    friend PrecReal sub(const PrecReal& a, const PrecReal& b, Rounding dir);
    friend PrecReal pow(const PrecReal& a, const Int& e, Rounding dir);  // e >= 0
    friend PrecReal pow(const PrecReal& a, unsigned long e, Rounding dir);
    friend PrecReal sqrt(const PrecReal& a, Rounding dir);
    friend PrecReal recip(const PrecReal& a, Rounding dir);

    friend const PrecReal& min(const PrecReal& a, const PrecReal& b);
    friend const PrecReal& max(const PrecReal& a, const PrecReal& b);

    // Floor of the value for v >= 0. Nearest evaluation at the stored
    // precision; if the value sits within 2^-(prec/2) of an integer the
    // floor is not certifiable from this representation alone and
    // std::nullopt is returned so the caller can recompute at higher
    // precision from its own recipe.
    std::optional<Int> tryFloor() const;

    // Floor that treats a representation within 2^-(prec/2) of an integer
    // as denoting that integer exactly. For values with no recomputation
    // recipe (user-supplied range sizes like 10 or 11.7).
    Int snapFloor() const;

private:
    void setLogFrom(mpfr_srcptr v);

    mpfr_t log_;
    bool is_zero_;
    Rounding dir_;
    mpfr_prec_t prec_;

    friend class PrecRealAccess;
};

PrecReal mul(const PrecReal& a, const PrecReal& b, Rounding dir);
PrecReal div(const PrecReal& a, const PrecReal& b, Rounding dir);
PrecReal add(const PrecReal& a, const PrecReal& b, Rounding dir);
PrecReal sub(const PrecReal& a, const PrecReal& b, Rounding dir);
PrecReal pow(const PrecReal& a, const Int& e, Rounding dir);
PrecReal pow(const PrecReal& a, unsigned long e, Rounding dir);
PrecReal sqrt(const PrecReal& a, Rounding dir);
PrecReal recip(const PrecReal& a, Rounding dir);
const PrecReal& min(const PrecReal& a, const PrecReal& b);
const PrecReal& max(const PrecReal& a, const PrecReal& b);

}  // namespace ktree
