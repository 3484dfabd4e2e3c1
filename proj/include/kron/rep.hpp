#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "kron/dimvec.hpp"
#include "kron/errors.hpp"
#include "kron/matrix.hpp"

namespace kron {

/// A representation M = (M1, M2, n maps M1 -> M2) of K(n) over an exact
/// field. Both vertex spaces carry fixed standard bases; all structure lives
/// in the matrices, and base change is always explicit. Each map is stored as
/// a d2 x d1 matrix with columns indexed by M1.
template <class F>
struct KroneckerRep {
    QuiverParam quiver;
    F field;
    std::size_t d1 = 0, d2 = 0;
    std::vector<Matrix<F>> maps;

    DimVec dim() const {
        return {static_cast<std::int64_t>(d1), static_cast<std::int64_t>(d2)};
    }

    bool operator==(const KroneckerRep& o) const {
        return quiver == o.quiver && field == o.field && d1 == o.d1 && d2 == o.d2 &&
               maps == o.maps;
    }
};

template <class F>
KroneckerRep<F> zero_rep(QuiverParam q, F field, std::size_t d1, std::size_t d2) {
    KroneckerRep<F> r{q, field, d1, d2, {}};
    r.maps.assign(static_cast<std::size_t>(q.n), Matrix<F>(field, d2, d1));
    return r;
}

/// Checks the shape invariants; error messages name the offending arrow.
template <class F>
void validate(const KroneckerRep<F>& r) {
    if (r.maps.size() != static_cast<std::size_t>(r.quiver.n))
        throw PreconditionError("expected " + std::to_string(r.quiver.n) + " arrow maps, found " +
                                std::to_string(r.maps.size()));
    for (std::size_t i = 0; i < r.maps.size(); ++i) {
        const auto& m = r.maps[i];
        if (m.rows() != r.d2 || m.cols() != r.d1)
            throw PreconditionError("map for arrow " + std::to_string(i + 1) + " is " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                    ", expected " + std::to_string(r.d2) + "x" +
                                    std::to_string(r.d1));
        if (m.field() != r.field)
            throw PreconditionError("map for arrow " + std::to_string(i + 1) +
                                    " lives over a different field");
    }
}

/// Dual representation: swaps the vertex spaces and transposes every map, so
/// dim(dual) = delta(dim) and dual(dual(r)) == r bit-exact.
template <class F>
KroneckerRep<F> dual(const KroneckerRep<F>& r) {
    KroneckerRep<F> out{r.quiver, r.field, r.d2, r.d1, {}};
    out.maps.reserve(r.maps.size());
    for (const auto& m : r.maps) out.maps.push_back(m.transpose());
    return out;
}

template <class F>
KroneckerRep<F> direct_sum(const KroneckerRep<F>& a, const KroneckerRep<F>& b) {
    if (a.quiver != b.quiver) throw PreconditionError("direct sum needs equal arrow counts");
    if (a.field != b.field) throw PreconditionError("direct sum needs a common field");
    KroneckerRep<F> out{a.quiver, a.field, a.d1 + b.d1, a.d2 + b.d2, {}};
    for (std::size_t i = 0; i < a.maps.size(); ++i) {
        Matrix<F> m(a.field, out.d2, out.d1);
        for (std::size_t r = 0; r < a.d2; ++r)
            for (std::size_t c = 0; c < a.d1; ++c) m(r, c) = a.maps[i](r, c);
        for (std::size_t r = 0; r < b.d2; ++r)
            for (std::size_t c = 0; c < b.d1; ++c) m(a.d2 + r, a.d1 + c) = b.maps[i](r, c);
        out.maps.push_back(std::move(m));
    }
    return out;
}

enum class StdModule { S1, S2, P1, P2, I1, I2 };

/// Simples, projectives and injectives of K(n). With all arrows source->sink:
/// P(2) = S(2), I(1) = S(1); P(1) has dimension vector (1, n) with the n maps
/// stacking to a basis of M2 (unit columns here); I(2) is its dual.
template <class F>
KroneckerRep<F> standard_module(StdModule kind, QuiverParam q, F field) {
    switch (kind) {
        case StdModule::S1:
        case StdModule::I1:
            return zero_rep(q, field, 1, 0);
        case StdModule::S2:
        case StdModule::P2:
            return zero_rep(q, field, 0, 1);
        case StdModule::P1: {
            KroneckerRep<F> r = zero_rep(q, field, 1, static_cast<std::size_t>(q.n));
            for (std::size_t i = 0; i < r.maps.size(); ++i) r.maps[i](i, 0) = field.one();
            return r;
        }
        case StdModule::I2:
            return dual(standard_module(StdModule::P1, q, field));
    }
    throw std::logic_error("unreachable");
}

/// Embedding into K(n+1): one extra arrow acting by zero. The dimension
/// vector is unchanged.
template <class F>
KroneckerRep<F> embed_iota(const KroneckerRep<F>& r) {
    KroneckerRep<F> out{QuiverParam(r.quiver.n + 1), r.field, r.d1, r.d2, r.maps};
    out.maps.emplace_back(r.field, r.d2, r.d1);
    return out;
}

/// The (n * |vectors|) x d2 matrix whose block for a vector m has row i equal
/// to (map_i * m)^t. For a single vector this is the generator stack A_m; two
/// vectors give the paired stack used by the mid-range criterion.
template <class F>
Matrix<F> stacked_matrix(const KroneckerRep<F>& r,
                         const std::vector<std::vector<typename F::Elem>>& vectors) {
    const std::size_t n = r.maps.size();
    Matrix<F> out(r.field, n * vectors.size(), r.d2);
    for (std::size_t v = 0; v < vectors.size(); ++v) {
        const auto& m = vectors[v];
        if (m.size() != r.d1)
            throw PreconditionError("generator vector has length " + std::to_string(m.size()) +
                                    ", expected " + std::to_string(r.d1));
        for (std::size_t i = 0; i < n; ++i) {
            const auto& map = r.maps[i];
            for (std::size_t row = 0; row < r.d2; ++row) {
                auto acc = r.field.zero();
                for (std::size_t c = 0; c < r.d1; ++c)
                    acc = r.field.add(acc, r.field.mul(map(row, c), m[c]));
                out(v * n + i, row) = acc;
            }
        }
    }
    return out;
}

template <class F>
Matrix<F> stacked_matrix(const KroneckerRep<F>& r, const std::vector<typename F::Elem>& m) {
    return stacked_matrix(r, std::vector<std::vector<typename F::Elem>>{m});
}

/// Pair of column-span bases (U1 in M1, U2 in M2) with map(U1) contained in
/// U2 for every arrow.
template <class F>
struct SubmoduleWitness {
    Matrix<F> basis1, basis2;

    DimVec dim() const {
        return {static_cast<std::int64_t>(basis1.cols()), static_cast<std::int64_t>(basis2.cols())};
    }
};

template <class F>
bool is_submodule_witness(const KroneckerRep<F>& r, const SubmoduleWitness<F>& w) {
    if (w.basis1.rows() != r.d1 || w.basis2.rows() != r.d2) return false;
    const std::size_t rk2 = rank(w.basis2);
    if (rank(w.basis1) != w.basis1.cols() || rk2 != w.basis2.cols()) return false;
    for (const auto& m : r.maps) {
        if (w.basis1.cols() == 0) continue;
        Matrix<F> img = m * w.basis1;
        if (rank(hconcat(w.basis2, img)) != rk2) return false;
    }
    return true;
}

template <class F>
struct GeneratedSubmodule {
    SubmoduleWitness<F> witness;
    DimVec dim;
};

/// Smallest submodule containing the given vertex-1 generators:
/// U1 = span(gens), U2 = span of all arrow images of U1. Zero generators are
/// rejected, since every criterion quantifies over nonzero vectors.
template <class F>
GeneratedSubmodule<F> generated_submodule(const KroneckerRep<F>& r,
                                          const std::vector<std::vector<typename F::Elem>>& gens) {
    if (gens.empty()) throw PreconditionError("generated_submodule needs at least one generator");
    Matrix<F> g(r.field, r.d1, gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j) {
        if (gens[j].size() != r.d1)
            throw PreconditionError("generator vector has length " + std::to_string(gens[j].size()) +
                                    ", expected " + std::to_string(r.d1));
        bool nonzero = false;
        for (std::size_t i = 0; i < r.d1; ++i) {
            g(i, j) = gens[j][i];
            if (!r.field.is_zero(g(i, j))) nonzero = true;
        }
        if (!nonzero)
            throw PreconditionError("zero generator rejected (position " + std::to_string(j) + ")");
    }
    Matrix<F> basis1 = column_space_basis(g);
    Matrix<F> images(r.field, r.d2, 0);
    for (const auto& m : r.maps) images = hconcat(images, m * basis1);
    Matrix<F> basis2 = column_space_basis(images);

    // dim U2 coincides with the rank of the stacked matrix over a basis of U1
    std::vector<std::vector<typename F::Elem>> basis_vecs;
    for (std::size_t j = 0; j < basis1.cols(); ++j) basis_vecs.push_back(basis1.col_vector(j));
    if (rank(stacked_matrix(r, basis_vecs)) != basis2.cols())
        throw std::logic_error("generated submodule: stacked rank disagrees with image span");

    GeneratedSubmodule<F> out{SubmoduleWitness<F>{std::move(basis1), std::move(basis2)}, {}};
    out.dim = out.witness.dim();
    return out;
}

/// The banded module X(x,y): map k (1-based) sends e_j to e'_{k-j+1}, indices
/// outside 1..y reading as zero. Needs x, y >= 1 and x + y - 1 <= n so every
/// arrow index stays in range; x + y = n + 1 is the case of interest.
template <class F>
KroneckerRep<F> make_x(QuiverParam q, std::int64_t x, std::int64_t y, F field) {
    if (x < 1 || y < 1)
        throw PreconditionError("make_x needs x >= 1 and y >= 1");
    if (x + y - 1 > q.n)
        throw PreconditionError("make_x needs x + y <= n + 1 (arrow indices run out at x+y-1 = " +
                                std::to_string(x + y - 1) + " > n = " + std::to_string(q.n) + ")");
    KroneckerRep<F> r = zero_rep(q, field, static_cast<std::size_t>(x), static_cast<std::size_t>(y));
    // entry (row, col) of map k is 1 exactly when k = row + col (0-based)
    for (std::size_t row = 0; row < r.d2; ++row)
        for (std::size_t col = 0; col < r.d1; ++col)
            if (row + col < r.maps.size()) r.maps[row + col](row, col) = field.one();
    return r;
}

/// Factor representation on complement coordinates; deterministic because the
/// complement pivots are the echelon completion of the witness bases.
template <class F>
KroneckerRep<F> quotient(const KroneckerRep<F>& r, const SubmoduleWitness<F>& w) {
    SubmoduleWitness<F> canon{column_space_basis(w.basis1), column_space_basis(w.basis2)};
    if (canon.basis1.rows() != r.d1 || canon.basis2.rows() != r.d2)
        throw PreconditionError("witness bases have the wrong ambient dimension");
    if (!is_submodule_witness(r, canon))
        throw PreconditionError("witness is not a submodule: some arrow image leaves U2");
    const std::size_t u1 = canon.basis1.cols(), u2 = canon.basis2.cols();
    Matrix<F> p1 = completed_basis(canon.basis1);
    Matrix<F> p2 = completed_basis(canon.basis2);
    Matrix<F> p2_inv = inverse(p2);
    KroneckerRep<F> out{r.quiver, r.field, r.d1 - u1, r.d2 - u2, {}};
    for (const auto& m : r.maps) {
        Matrix<F> conj = p2_inv * (m * p1);
        out.maps.push_back(conj.block(u2, u1, r.d2 - u2, r.d1 - u1));
    }
    return out;
}

} // namespace kron
