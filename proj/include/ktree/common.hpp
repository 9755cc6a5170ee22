#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace ktree {

// Arbitrary-magnitude integer and exact rational. Rationals produced by
// gmpxx arithmetic are kept canonical (lowest terms, positive denominator).
using Int = mpz_class;
using ExactRational = mpq_class;

class ParamError : public std::invalid_argument {
public:
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

inline ExactRational makeRational(const Int& num, const Int& den) {
    ExactRational q(num, den);
    q.canonicalize();
    return q;
}

inline Int intPow(Int base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// k = 2^logK with logK >= 1; throws on anything else.
unsigned checkedLogK(const Int& k);

inline unsigned checkedLogK(unsigned long k) { return checkedLogK(Int(static_cast<unsigned long>(k))); }

}  // namespace ktree
