#pragma once

#include <cstdint>
#include <vector>

#include "kron/errors.hpp"
#include "kron/field.hpp"
#include "kron/matrix.hpp"

namespace kron {

/// (p^dim - 1)/(p - 1), the number of projective points of F_p^dim; throws on
/// overflow past 2^62.
inline std::uint64_t projective_point_count(std::uint64_t p, std::size_t dim) {
    std::uint64_t total = 0, power = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        total += power;
        if (power > (std::uint64_t{1} << 62) / p)
            throw CapExceeded("projective point count overflows at dimension " + std::to_string(dim));
        power *= p;
    }
    return total;
}

inline std::uint64_t pow_u64_checked(std::uint64_t base, std::uint64_t exp, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (r > limit / base)
            throw CapExceeded("enumeration size exceeds 2^63");
        r *= base;
    }
    return r;
}

/// Visits one representative per projective point of F_p^dim: first nonzero
/// coordinate normalized to 1, remaining coordinates counted in lexicographic
/// order (most significant first). Return false from fn to stop early.
template <class Fn>
bool for_each_projective_point(const PrimeField& f, std::size_t dim, Fn&& fn) {
    const std::uint64_t p = f.modulus();
    std::vector<PrimeField::Elem> v(dim, 0);
    for (std::size_t lead = 0; lead < dim; ++lead) {
        std::fill(v.begin(), v.end(), 0);
        v[lead] = 1;
        const std::size_t tail = dim - lead - 1;
        const std::uint64_t combos = pow_u64_checked(p, tail, std::uint64_t{1} << 62);
        for (std::uint64_t c = 0; c < combos; ++c) {
            std::uint64_t rem = c;
            for (std::size_t j = 0; j < tail; ++j) {
                const std::uint64_t digit_pos = tail - 1 - j;
                v[lead + 1 + digit_pos] = rem % p;
                rem /= p;
            }
            if (!fn(const_cast<const std::vector<PrimeField::Elem>&>(v))) return false;
        }
    }
    return true;
}

/// Visits every nonzero {0,1} vector of the given length (used as rational
/// test patterns). Return false from fn to stop early.
template <class F, class Fn>
bool for_each_01_pattern(const F& field, std::size_t dim, Fn&& fn) {
    if (dim >= 62) throw CapExceeded("0/1 pattern enumeration capped at dimension 61");
    std::vector<typename F::Elem> v(dim, field.zero());
    const std::uint64_t total = std::uint64_t{1} << dim;
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        for (std::size_t i = 0; i < dim; ++i)
            v[i] = (mask >> i) & 1 ? field.one() : field.zero();
        if (!fn(const_cast<const std::vector<typename F::Elem>&>(v))) return false;
    }
    return true;
}

/// Gaussian binomial [d choose k]_p: the number of k-dimensional subspaces of
/// F_p^d. Exact in uint64 at the desk scales used here.
inline std::uint64_t gaussian_binomial(std::uint64_t p, std::size_t d, std::size_t k) {
    if (k > d) return 0;
    // prod_{i=0..k-1} (p^{d-i} - 1) / (p^{i+1} - 1), evaluated stepwise
    std::uint64_t num = 1, den = 1;
    auto pw = [&](std::size_t e) { return pow_u64_checked(p, e, std::uint64_t{1} << 62); };
    for (std::size_t i = 0; i < k; ++i) {
        num *= pw(d - i) - 1;
        den *= pw(i + 1) - 1;
        if (num % den == 0) { // keep intermediates small when possible
            num /= den;
            den = 1;
        }
    }
    return num / den;
}

/// Visits every k-dimensional subspace of F_p^d exactly once, presented as a
/// d x k matrix whose columns are the transposed rows of the unique reduced
/// row-echelon basis. Return false from fn to stop early.
template <class Fn>
bool for_each_subspace_of_dim(const PrimeField& f, std::size_t d, std::size_t k, Fn&& fn) {
    if (k > d) return true;
    if (k == 0) return fn(Matrix<PrimeField>(f, d, 0));
    const std::uint64_t p = f.modulus();
    // iterate pivot-column combinations in ascending lexicographic order
    std::vector<std::size_t> piv(k);
    for (std::size_t i = 0; i < k; ++i) piv[i] = i;
    while (true) {
        // free slots: row i may hold arbitrary values at non-pivot columns > piv[i]
        std::vector<std::pair<std::size_t, std::size_t>> free_slots;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = piv[i] + 1; c < d; ++c) {
                bool is_pivot = false;
                for (std::size_t j = 0; j < k; ++j)
                    if (piv[j] == c) { is_pivot = true; break; }
                if (!is_pivot) free_slots.emplace_back(i, c);
            }
        const std::uint64_t combos =
            pow_u64_checked(p, free_slots.size(), std::uint64_t{1} << 62);
        for (std::uint64_t cnt = 0; cnt < combos; ++cnt) {
            Matrix<PrimeField> basis(f, d, k);
            for (std::size_t i = 0; i < k; ++i) basis(piv[i], i) = 1;
            std::uint64_t rem = cnt;
            for (const auto& [row, col] : free_slots) {
                basis(col, row) = rem % p;
                rem /= p;
            }
            if (!fn(const_cast<const Matrix<PrimeField>&>(basis))) return false;
        }
        // next combination of pivot columns
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (piv[i] + (k - i) < d) {
                ++piv[i];
                for (std::size_t j = i + 1; j < k; ++j) piv[j] = piv[j - 1] + 1;
                break;
            }
            if (i == 0) return true;
        }
    }
}

/// All subspaces of F_p^d, dimension 0 through d inclusive.
template <class Fn>
bool for_each_subspace(const PrimeField& f, std::size_t d, Fn&& fn) {
    for (std::size_t k = 0; k <= d; ++k)
        if (!for_each_subspace_of_dim(f, d, k, fn)) return false;
    return true;
}

} // namespace kron
