#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "kron/errors.hpp"

namespace kron {

inline bool is_prime_u64(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

/// Prime field F_p for a small prime p (2 <= p <= 2^31). Elements are kept as
/// least nonnegative residues, so entrywise equality is field equality.
class PrimeField {
public:
    using Elem = std::uint64_t;

    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (p < 2 || p > (std::uint64_t{1} << 31) || !is_prime_u64(p))
            throw PreconditionError("field modulus must be a prime with 2 <= p <= 2^31, got " +
                                    std::to_string(p));
    }

    std::uint64_t modulus() const { return p_; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    bool is_zero(Elem a) const { return a == 0; }

    Elem add(Elem a, Elem b) const {
        Elem s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
    Elem mul(Elem a, Elem b) const { return (a * b) % p_; } // p <= 2^31, no overflow

    Elem inv(Elem a) const {
        if (a == 0) throw PreconditionError("division by zero in F_p");
        // extended Euclid on (a, p)
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = static_cast<std::int64_t>(p_), new_r = static_cast<std::int64_t>(a);
        while (new_r != 0) {
            std::int64_t q = r / new_r;
            t -= q * new_t;
            std::swap(t, new_t);
            r -= q * new_r;
            std::swap(r, new_r);
        }
        if (t < 0) t += static_cast<std::int64_t>(p_);
        return static_cast<Elem>(t);
    }

    Elem from_int(long long v) const {
        long long r = v % static_cast<long long>(p_);
        if (r < 0) r += static_cast<long long>(p_);
        return static_cast<Elem>(r);
    }

    std::string to_string(Elem a) const { return std::to_string(a); }

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }
    bool operator!=(const PrimeField& o) const { return !(*this == o); }

private:
    std::uint64_t p_;
};

/// The rationals with arbitrary-precision arithmetic (GMP). No rounding anywhere.
class RationalField {
public:
    using Elem = mpq_class;

    Elem zero() const { return Elem(0); }
    Elem one() const { return Elem(1); }
    bool is_zero(const Elem& a) const { return sgn(a) == 0; }

    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem inv(const Elem& a) const {
        if (sgn(a) == 0) throw PreconditionError("division by zero in Q");
        return 1 / a;
    }

    Elem from_int(long long v) const { return Elem(static_cast<long>(v)); }

    /// Parses "a" or "a/b" (b != 0); result is fully reduced with positive denominator.
    Elem parse(const std::string& s) const {
        mpq_class v;
        if (v.set_str(s, 10) != 0)
            throw PreconditionError("not a rational number: '" + s + "'");
        if (sgn(v.get_den()) == 0)
            throw PreconditionError("zero denominator in rational '" + s + "'");
        v.canonicalize();
        return v;
    }

    std::string to_string(const Elem& a) const {
        if (a.get_den() == 1) return a.get_num().get_str();
        return a.get_num().get_str() + "/" + a.get_den().get_str();
    }

    bool operator==(const RationalField&) const { return true; }
    bool operator!=(const RationalField&) const { return false; }
};

/// Runtime field tag used at serialization and CLI boundaries.
struct FieldSpec {
    enum class Kind { prime, rational };

    Kind kind = Kind::rational;
    std::uint64_t p = 0;

    static FieldSpec prime(std::uint64_t p) {
        PrimeField check(p); // validates primality and range
        return FieldSpec{Kind::prime, check.modulus()};
    }
    static FieldSpec rational() { return FieldSpec{Kind::rational, 0}; }

    bool operator==(const FieldSpec&) const = default;
};

inline FieldSpec spec_of(const PrimeField& f) { return FieldSpec::prime(f.modulus()); }
inline FieldSpec spec_of(const RationalField&) { return FieldSpec::rational(); }

/// Instantiates the field named by `spec` and calls `fn` with it.
template <class Fn>
decltype(auto) with_field(const FieldSpec& spec, Fn&& fn) {
    if (spec.kind == FieldSpec::Kind::prime) return fn(PrimeField(spec.p));
    return fn(RationalField{});
}

} // namespace kron
