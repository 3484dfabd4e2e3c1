#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "kron/errors.hpp"
#include "kron/field.hpp"

namespace kron {

/// Dense row-major matrix over an exact field. Treated as an immutable value
/// after construction: every operation returns a new matrix, so matrices are
/// safe to share across threads.
template <class F>
class Matrix {
public:
    using Field = F;
    using Elem = typename F::Elem;

    Matrix(F field, std::size_t rows, std::size_t cols)
        : field_(field), rows_(rows), cols_(cols), ents_(rows * cols, field.zero()) {}

    static Matrix identity(F field, std::size_t n) {
        Matrix m(field, n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
        return m;
    }

    /// Builds from integer literals, reducing each entry to canonical form.
    static Matrix from_ints(F field, std::initializer_list<std::initializer_list<long long>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows.begin()->size();
        Matrix m(field, r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw PreconditionError("ragged matrix literal");
            std::size_t j = 0;
            for (long long v : row) m(i, j++) = field.from_int(v);
            ++i;
        }
        return m;
    }

    const F& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Elem& operator()(std::size_t r, std::size_t c) { return ents_[r * cols_ + c]; }
    const Elem& operator()(std::size_t r, std::size_t c) const { return ents_[r * cols_ + c]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && ents_ == o.ents_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    bool is_zero() const {
        for (const auto& e : ents_)
            if (!field_.is_zero(e)) return false;
        return true;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j)
            std::swap((*this)(a, j), (*this)(b, j));
    }

    Matrix transpose() const {
        Matrix t(field_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        require_same_field(o);
        if (cols_ != o.rows_) throw PreconditionError("matrix product shape mismatch");
        Matrix out(field_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Elem& a = (*this)(i, k);
                if (field_.is_zero(a)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    out(i, j) = field_.add(out(i, j), field_.mul(a, o(k, j)));
            }
        return out;
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix out(field_, rows_, cols_);
        for (std::size_t i = 0; i < ents_.size(); ++i)
            out.ents_[i] = field_.add(ents_[i], o.ents_[i]);
        return out;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix out(field_, rows_, cols_);
        for (std::size_t i = 0; i < ents_.size(); ++i)
            out.ents_[i] = field_.sub(ents_[i], o.ents_[i]);
        return out;
    }

    Matrix scaled(const Elem& c) const {
        Matrix out(field_, rows_, cols_);
        for (std::size_t i = 0; i < ents_.size(); ++i) out.ents_[i] = field_.mul(c, ents_[i]);
        return out;
    }

    /// Copies rows [r0, r0+nr) x cols [c0, c0+nc).
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw PreconditionError("block out of range");
        Matrix out(field_, nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
        return out;
    }

    std::vector<Elem> col_vector(std::size_t j) const {
        std::vector<Elem> v;
        v.reserve(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
        return v;
    }

    void require_same_field(const Matrix& o) const {
        if (field_ != o.field_) throw PreconditionError("matrices live over different fields");
    }
    void require_same_shape(const Matrix& o) const {
        require_same_field(o);
        if (rows_ != o.rows_ || cols_ != o.cols_) throw PreconditionError("matrix shape mismatch");
    }

private:
    F field_;
    std::size_t rows_, cols_;
    std::vector<Elem> ents_;
};

template <class F>
Matrix<F> hconcat(const Matrix<F>& a, const Matrix<F>& b) {
    a.require_same_field(b);
    if (a.rows() != b.rows()) throw PreconditionError("hconcat row mismatch");
    Matrix<F> out(a.field(), a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
    }
    return out;
}

template <class F>
Matrix<F> vconcat(const Matrix<F>& a, const Matrix<F>& b) {
    a.require_same_field(b);
    if (a.cols() != b.cols()) throw PreconditionError("vconcat column mismatch");
    Matrix<F> out(a.field(), a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
    return out;
}

namespace detail {

/// Reduced row echelon form in place; returns the pivot column indices.
/// Pivot choice is the first nonzero entry scanning down, so the result is
/// deterministic for a given input.
template <class F>
std::vector<std::size_t> rref_in_place(Matrix<F>& a) {
    const F& k = a.field();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t pr = r;
        while (pr < a.rows() && k.is_zero(a(pr, c))) ++pr;
        if (pr == a.rows()) continue;
        a.swap_rows(pr, r);
        const auto piv_inv = k.inv(a(r, c));
        for (std::size_t j = c; j < a.cols(); ++j) a(r, j) = k.mul(a(r, j), piv_inv);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == r || k.is_zero(a(i, c))) continue;
            const auto f = a(i, c);
            for (std::size_t j = c; j < a.cols(); ++j)
                a(i, j) = k.sub(a(i, j), k.mul(f, a(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class F>
std::size_t rank_generic(const Matrix<F>& m) {
    Matrix<F> a = m;
    return rref_in_place(a).size();
}

template <class F>
Matrix<F> kernel_basis_generic(const Matrix<F>& m) {
    Matrix<F> a = m;
    const auto pivots = rref_in_place(a);
    const F& k = a.field();
    std::vector<std::size_t> free_cols;
    {
        std::size_t pi = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (pi < pivots.size() && pivots[pi] == c) {
                ++pi;
            } else {
                free_cols.push_back(c);
            }
        }
    }
    Matrix<F> ker(m.field(), m.cols(), free_cols.size());
    for (std::size_t idx = 0; idx < free_cols.size(); ++idx) {
        const std::size_t f = free_cols[idx];
        ker(f, idx) = k.one();
        for (std::size_t i = 0; i < pivots.size(); ++i)
            ker(pivots[i], idx) = k.neg(a(i, f));
    }
    return ker;
}

/// Bit-packed rows over F_2; one uint64 word holds 64 columns.
struct Gf2Matrix {
    std::size_t rows = 0, cols = 0, wpr = 0;
    std::vector<std::uint64_t> bits;

    Gf2Matrix(std::size_t r, std::size_t c)
        : rows(r), cols(c), wpr((c + 63) / 64), bits(r * wpr, 0) {}

    bool get(std::size_t i, std::size_t j) const {
        return (bits[i * wpr + j / 64] >> (j % 64)) & 1u;
    }
    void set(std::size_t i, std::size_t j) { bits[i * wpr + j / 64] |= std::uint64_t{1} << (j % 64); }

    void xor_rows(std::size_t dst, std::size_t src) {
        for (std::size_t w = 0; w < wpr; ++w) bits[dst * wpr + w] ^= bits[src * wpr + w];
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t w = 0; w < wpr; ++w) std::swap(bits[a * wpr + w], bits[b * wpr + w]);
    }
};

inline Gf2Matrix pack_gf2(const Matrix<PrimeField>& m) {
    Gf2Matrix g(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j)) g.set(i, j);
    return g;
}

/// Same pivot policy as the generic path, XOR elimination.
inline std::vector<std::size_t> gf2_rref_in_place(Gf2Matrix& a) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols && r < a.rows; ++c) {
        std::size_t pr = r;
        while (pr < a.rows && !a.get(pr, c)) ++pr;
        if (pr == a.rows) continue;
        a.swap_rows(pr, r);
        for (std::size_t i = 0; i < a.rows; ++i)
            if (i != r && a.get(i, c)) a.xor_rows(i, r);
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank_gf2(const Matrix<PrimeField>& m) {
    Gf2Matrix g = pack_gf2(m);
    return gf2_rref_in_place(g).size();
}

inline Matrix<PrimeField> kernel_basis_gf2(const Matrix<PrimeField>& m) {
    Gf2Matrix g = pack_gf2(m);
    const auto pivots = gf2_rref_in_place(g);
    std::vector<std::size_t> free_cols;
    {
        std::size_t pi = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (pi < pivots.size() && pivots[pi] == c) {
                ++pi;
            } else {
                free_cols.push_back(c);
            }
        }
    }
    Matrix<PrimeField> ker(m.field(), m.cols(), free_cols.size());
    for (std::size_t idx = 0; idx < free_cols.size(); ++idx) {
        const std::size_t f = free_cols[idx];
        ker(f, idx) = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i)
            if (g.get(i, f)) ker(pivots[i], idx) = 1;
    }
    return ker;
}

} // namespace detail

/// Rank by exact Gaussian elimination (XOR elimination on packed rows over F_2).
template <class F>
std::size_t rank(const Matrix<F>& m) {
    if constexpr (std::is_same_v<F, PrimeField>) {
        if (m.field().modulus() == 2) return detail::rank_gf2(m);
    }
    return detail::rank_generic(m);
}

/// Columns form a basis of the null space: m * result = 0 and
/// cols(result) = cols(m) - rank(m).
template <class F>
Matrix<F> kernel_basis(const Matrix<F>& m) {
    if constexpr (std::is_same_v<F, PrimeField>) {
        if (m.field().modulus() == 2) return detail::kernel_basis_gf2(m);
    }
    return detail::kernel_basis_generic(m);
}

/// Some X with a*X = b, or nullopt when the system is inconsistent.
template <class F>
std::optional<Matrix<F>> solve(const Matrix<F>& a, const Matrix<F>& b) {
    a.require_same_field(b);
    if (a.rows() != b.rows()) throw PreconditionError("solve: row count mismatch");
    Matrix<F> aug = hconcat(a, b);
    const auto pivots = detail::rref_in_place(aug);
    for (auto p : pivots)
        if (p >= a.cols()) return std::nullopt;
    Matrix<F> x(a.field(), a.cols(), b.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) x(pivots[i], j) = aug(i, a.cols() + j);
    return x;
}

template <class F>
bool is_invertible(const Matrix<F>& m) {
    if (m.rows() != m.cols()) throw PreconditionError("invertibility is defined for square matrices");
    return rank(m) == m.rows();
}

template <class F>
Matrix<F> inverse(const Matrix<F>& m) {
    if (m.rows() != m.cols()) throw PreconditionError("inverse of a non-square matrix");
    auto x = solve(m, Matrix<F>::identity(m.field(), m.rows()));
    if (!x || rank(m) != m.rows()) throw PreconditionError("matrix is singular");
    return *x;
}

/// Canonical basis of the column space: the nonzero rows of rref(m^t),
/// transposed back to columns. Depends only on the span, not on the
/// presentation, so equal spans serialize identically.
template <class F>
Matrix<F> column_space_basis(const Matrix<F>& m) {
    Matrix<F> t = m.transpose();
    const auto pivots = detail::rref_in_place(t);
    Matrix<F> out(m.field(), m.rows(), pivots.size());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t r = 0; r < m.rows(); ++r) out(r, i) = t(i, r);
    return out;
}

/// Indices of standard basis vectors extending span(cols of b) to the full
/// space, chosen greedily left to right (echelon pivot completion).
template <class F>
std::vector<std::size_t> complement_pivots(const Matrix<F>& b) {
    const std::size_t d = b.rows();
    Matrix<F> aug = hconcat(b, Matrix<F>::identity(b.field(), d));
    const auto pivots = detail::rref_in_place(aug);
    std::vector<std::size_t> out;
    for (auto p : pivots)
        if (p >= b.cols()) out.push_back(p - b.cols());
    return out;
}

/// [b | e_{i1} | e_{i2} | ...] for the complement indices of b; always square
/// and invertible when b has full column rank.
template <class F>
Matrix<F> completed_basis(const Matrix<F>& b) {
    const std::size_t d = b.rows();
    const auto idx = complement_pivots(b);
    Matrix<F> out(b.field(), d, b.cols() + idx.size());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) = b(i, j);
    for (std::size_t j = 0; j < idx.size(); ++j) out(idx[j], b.cols() + j) = b.field().one();
    return out;
}

/// One row per input matrix, flattened row-major; rank of the result is the
/// dimension of the span of the input matrices inside the matrix space.
template <class F>
Matrix<F> flatten_to_rows(const std::vector<Matrix<F>>& mats) {
    if (mats.empty()) throw PreconditionError("flatten_to_rows needs at least one matrix");
    const std::size_t r = mats.front().rows(), c = mats.front().cols();
    Matrix<F> out(mats.front().field(), mats.size(), r * c);
    for (std::size_t k = 0; k < mats.size(); ++k) {
        if (mats[k].rows() != r || mats[k].cols() != c)
            throw PreconditionError("flatten_to_rows: mixed shapes");
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) out(k, i * c + j) = mats[k](i, j);
    }
    return out;
}

} // namespace kron
