#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "kron/dimvec.hpp"
#include "kron/errors.hpp"
#include "kron/matrix.hpp"
#include "kron/rep.hpp"

namespace kron {

/// Result of one reflection: the reflected representation plus the dimension
/// of simple summands annihilated by the step. For input without a killed
/// simple summand, dim(rep) = sigma(dim(input)) (resp. sigma_inv).
template <class F>
struct ReflectionResult {
    KroneckerRep<F> rep;
    std::size_t killed = 0;
};

/// Reflection at the sink: the new source space is the kernel of the combined
/// map M1^n -> M2, (m_1..m_n) |-> sum map_i(m_i); the new maps are coordinate
/// projections restricted to that kernel, landing in the old M1. Kills the
/// S(2) multiplicity (the cokernel of the combined map).
template <class F>
ReflectionResult<F> reflect_sink(const KroneckerRep<F>& r) {
    validate(r);
    Matrix<F> h(r.field, r.d2, 0); // [map_1 | ... | map_n]
    for (const auto& m : r.maps) h = hconcat(h, m);
    Matrix<F> ker = kernel_basis(h); // (n d1) x k, echelon order
    const std::size_t killed = r.d2 - rank(h);
    KroneckerRep<F> out{r.quiver, r.field, ker.cols(), r.d1, {}};
    for (std::size_t i = 0; i < r.maps.size(); ++i)
        out.maps.push_back(ker.block(i * r.d1, 0, r.d1, ker.cols()));
    return {std::move(out), killed};
}

/// Reflection at the source: the new sink space is the cokernel of the
/// combined map M1 -> M2^n; the new maps are the coordinate inclusions of M2
/// followed by the quotient projection. Kills the S(1) multiplicity (the
/// kernel of the combined map).
template <class F>
ReflectionResult<F> reflect_source(const KroneckerRep<F>& r) {
    validate(r);
    Matrix<F> v(r.field, 0, r.d1); // [map_1; ...; map_n]
    for (const auto& m : r.maps) v = vconcat(v, m);
    const std::size_t rk = rank(v);
    const std::size_t killed = r.d1 - rk;
    Matrix<F> image = column_space_basis(v);
    Matrix<F> p = completed_basis(image);
    Matrix<F> proj = inverse(p).block(rk, 0, v.rows() - rk, v.rows()); // coker x (n d2)
    KroneckerRep<F> out{r.quiver, r.field, r.d2, v.rows() - rk, {}};
    for (std::size_t i = 0; i < r.maps.size(); ++i)
        out.maps.push_back(proj.block(0, i * r.d2, proj.rows(), r.d2));
    return {std::move(out), killed};
}

/// Coxeter translate: two reflections per unit of t, direction by sign.
template <class F>
KroneckerRep<F> coxeter(const KroneckerRep<F>& r, int t, int bound = 16) {
    if (t > bound || t < -bound)
        throw PreconditionError("coxeter translate bound exceeded: |" + std::to_string(t) +
                                "| > " + std::to_string(bound));
    KroneckerRep<F> cur = r;
    for (int i = 0; i < 2 * (t >= 0 ? t : -t); ++i)
        cur = (t >= 0 ? reflect_sink(cur) : reflect_source(cur)).rep;
    return cur;
}

enum class Regularity { regular, has_preprojective_summand, has_preinjective_summand, inconclusive };

inline std::string to_string(Regularity v) {
    switch (v) {
        case Regularity::regular: return "regular";
        case Regularity::has_preprojective_summand: return "has_preprojective_summand";
        case Regularity::has_preinjective_summand: return "has_preinjective_summand";
        case Regularity::inconclusive: return "inconclusive";
    }
    throw std::logic_error("unreachable");
}

namespace detail {

/// Number of sink reflections after which any preprojective summand of a
/// module of total dimension <= total must have been killed. The k-th
/// indecomposable preprojective has dimension vector sigma^{-k}(0,1) and dies
/// at step k+1, so only summands with sigma^{-k}(0,1) fitting inside the
/// module can exist at all. Grows like log(total), which keeps the iterated
/// reflections polynomial even though dimension vectors expand geometrically.
inline int reflection_steps_needed(QuiverParam q, std::int64_t total) {
    DimVec d{0, 1};
    int k = 0;
    while (d.x + d.y <= total) {
        d = sigma_inv(q, d);
        ++k;
        if (k > 128) break; // unreachable at supported sizes
    }
    return k; // = 1 + max{k : sigma^{-k}(0,1) fits}
}

} // namespace detail

/// Detects preprojective/preinjective summands by iterating reflections until
/// any such summand must have descended to a simple and died. Sound whenever
/// the needed step count fits under 2*bound; otherwise reports inconclusive
/// rather than guessing.
template <class F>
Regularity regularity_test(const KroneckerRep<F>& r, int bound = 16) {
    if (bound < 1) throw PreconditionError("regularity bound must be >= 1");
    const std::int64_t total = static_cast<std::int64_t>(r.d1 + r.d2);
    if (total == 0) return Regularity::regular; // no summands at all
    const int needed = detail::reflection_steps_needed(r.quiver, total);
    const int steps = needed < 2 * bound ? needed : 2 * bound;

    bool certain = steps >= needed;
    {
        KroneckerRep<F> cur = r;
        for (int t = 0; t < steps; ++t) {
            DimVec expect = sigma(r.quiver, cur.dim());
            auto res = reflect_sink(cur);
            if (res.killed > 0) return Regularity::has_preprojective_summand;
            if (res.rep.dim() != expect)
                throw std::logic_error("kill-free reflection failed to track sigma");
            cur = std::move(res.rep);
        }
    }
    {
        KroneckerRep<F> cur = r;
        for (int t = 0; t < steps; ++t) {
            DimVec expect = sigma_inv(r.quiver, cur.dim());
            auto res = reflect_source(cur);
            if (res.killed > 0) return Regularity::has_preinjective_summand;
            if (res.rep.dim() != expect)
                throw std::logic_error("kill-free reflection failed to track sigma_inv");
            cur = std::move(res.rep);
        }
    }
    return certain ? Regularity::regular : Regularity::inconclusive;
}

} // namespace kron
