#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kron/dimvec.hpp"
#include "kron/errors.hpp"
#include "kron/functors.hpp"
#include "kron/matrix.hpp"
#include "kron/rep.hpp"
#include "kron/subspaces.hpp"

namespace kron {

template <class F>
struct HomPair {
    Matrix<F> f1, f2;
};

/// Basis of all intertwiners (f1, f2) with map_b(i) * f1 = f2 * map_a(i) for
/// every arrow, computed as the kernel of one linear system in the entries of
/// f1 (b.d1 x a.d1) and f2 (b.d2 x a.d2).
template <class F>
std::vector<HomPair<F>> hom_space(const KroneckerRep<F>& a, const KroneckerRep<F>& b) {
    if (a.quiver != b.quiver) throw PreconditionError("hom space needs equal arrow counts");
    if (a.field != b.field) throw PreconditionError("hom space needs a common field");
    const std::size_t n = a.maps.size();
    const std::size_t nf1 = b.d1 * a.d1, nf2 = b.d2 * a.d2;
    Matrix<F> sys(a.field, n * b.d2 * a.d1, nf1 + nf2);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < b.d2; ++r)
            for (std::size_t c = 0; c < a.d1; ++c, ++row) {
                for (std::size_t s = 0; s < a.d2; ++s)
                    sys(row, nf1 + r * a.d2 + s) =
                        a.field.add(sys(row, nf1 + r * a.d2 + s), a.maps[i](s, c));
                for (std::size_t t = 0; t < b.d1; ++t)
                    sys(row, t * a.d1 + c) =
                        a.field.sub(sys(row, t * a.d1 + c), b.maps[i](r, t));
            }
    }
    Matrix<F> ker = kernel_basis(sys);
    std::vector<HomPair<F>> basis;
    basis.reserve(ker.cols());
    for (std::size_t k = 0; k < ker.cols(); ++k) {
        HomPair<F> h{Matrix<F>(a.field, b.d1, a.d1), Matrix<F>(a.field, b.d2, a.d2)};
        for (std::size_t t = 0; t < b.d1; ++t)
            for (std::size_t c = 0; c < a.d1; ++c) h.f1(t, c) = ker(t * a.d1 + c, k);
        for (std::size_t r = 0; r < b.d2; ++r)
            for (std::size_t s = 0; s < a.d2; ++s) h.f2(r, s) = ker(nf1 + r * a.d2 + s, k);
        basis.push_back(std::move(h));
    }
    return basis;
}

struct IsoOptions {
    std::uint64_t exhaustive_cap = std::uint64_t{1} << 20;
    int samples = 256;
    std::uint64_t seed = 0x6b726f6eULL;
};

namespace detail {

template <class F>
HomPair<F> combine_hom(const F& field, const std::vector<HomPair<F>>& basis,
                       const std::vector<typename F::Elem>& coeffs) {
    HomPair<F> out{Matrix<F>(field, basis[0].f1.rows(), basis[0].f1.cols()),
                   Matrix<F>(field, basis[0].f2.rows(), basis[0].f2.cols())};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (field.is_zero(coeffs[i])) continue;
        out.f1 = out.f1 + basis[i].f1.scaled(coeffs[i]);
        out.f2 = out.f2 + basis[i].f2.scaled(coeffs[i]);
    }
    return out;
}

} // namespace detail

/// Finds an invertible intertwiner pair or reports none. Over a prime field
/// the hom space is searched exhaustively (one representative per projective
/// point) below the cap, so nullopt is a definitive negative there; over the
/// rationals a deterministic sample of coefficient vectors is tried and the
/// search gives up with CapExceeded when nothing invertible shows up.
/// Dimension-vector mismatch is a precondition error, distinct from
/// "searched and failed".
template <class F>
std::optional<HomPair<F>> is_isomorphic(const KroneckerRep<F>& a, const KroneckerRep<F>& b,
                                        const IsoOptions& opt = {}) {
    if (a.quiver != b.quiver) throw PreconditionError("isomorphism test needs equal arrow counts");
    if (a.field != b.field) throw PreconditionError("isomorphism test needs a common field");
    if (a.d1 != b.d1 || a.d2 != b.d2)
        throw PreconditionError("dimension vectors differ: (" + std::to_string(a.d1) + "," +
                                std::to_string(a.d2) + ") vs (" + std::to_string(b.d1) + "," +
                                std::to_string(b.d2) + ")");
    if (a.d1 + a.d2 == 0)
        return HomPair<F>{Matrix<F>(a.field, 0, 0), Matrix<F>(a.field, 0, 0)};

    const auto basis = hom_space(a, b);
    if (basis.empty()) return std::nullopt;
    // hom dimensions are isomorphism invariants; a mismatch is a cheap definitive no
    if (hom_space(b, a).size() != basis.size() ||
        hom_space(a, a).size() != hom_space(b, b).size() ||
        basis.size() != hom_space(a, a).size())
        return std::nullopt;

    auto invertible_pair = [&](const HomPair<F>& h) {
        return is_invertible(h.f1) && is_invertible(h.f2);
    };

    if constexpr (std::is_same_v<F, PrimeField>) {
        const std::uint64_t points = projective_point_count(a.field.modulus(), basis.size());
        if (points <= opt.exhaustive_cap) {
            std::optional<HomPair<F>> found;
            for_each_projective_point(a.field, basis.size(),
                                      [&](const std::vector<PrimeField::Elem>& coeffs) {
                                          HomPair<F> h = detail::combine_hom(a.field, basis, coeffs);
                                          if (invertible_pair(h)) {
                                              found = std::move(h);
                                              return false;
                                          }
                                          return true;
                                      });
            return found; // exhausted: nullopt is definitive over F_p
        }
        std::mt19937_64 rng(opt.seed);
        std::uniform_int_distribution<std::uint64_t> dist(0, a.field.modulus() - 1);
        for (int trial = 0; trial < opt.samples; ++trial) {
            std::vector<PrimeField::Elem> coeffs(basis.size());
            bool nonzero = false;
            for (auto& c : coeffs) {
                c = dist(rng);
                nonzero |= c != 0;
            }
            if (!nonzero) continue;
            HomPair<F> h = detail::combine_hom(a.field, basis, coeffs);
            if (invertible_pair(h)) return h;
        }
        throw CapExceeded("isomorphism search inconclusive: " + std::to_string(points) +
                          " projective points exceed the cap of " +
                          std::to_string(opt.exhaustive_cap) + " and sampling found no unit");
    } else {
        std::mt19937_64 rng(opt.seed);
        for (int trial = 0; trial < opt.samples; ++trial) {
            const long long range = 1 + trial / 16; // widen slowly, stay deterministic
            std::uniform_int_distribution<long long> dist(-range, range);
            std::vector<typename F::Elem> coeffs(basis.size());
            bool nonzero = false;
            for (auto& c : coeffs) {
                const long long v = dist(rng);
                c = a.field.from_int(v);
                nonzero |= v != 0;
            }
            if (!nonzero) continue;
            HomPair<F> h = detail::combine_hom(a.field, basis, coeffs);
            if (invertible_pair(h)) return h;
        }
        throw CapExceeded(
            "isomorphism search inconclusive over the rationals after sampling budget");
    }
}

enum class Verdict { elementary, not_elementary, inconclusive };

/// How far a verdict reaches: exhaustive checks over F_p certify the
/// statement for the F_p-representation only; a concrete rank or split
/// witness survives any field extension; rational all-pass runs are
/// incomplete evidence because only finitely many test vectors exist.
enum class FieldScope { certified_over_fp, certified_over_closure, field_incomplete };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::elementary: return "elementary";
        case Verdict::not_elementary: return "not_elementary";
        case Verdict::inconclusive: return "inconclusive";
    }
    throw std::logic_error("unreachable");
}

inline std::string to_string(FieldScope s) {
    switch (s) {
        case FieldScope::certified_over_fp: return "certified_over_Fp";
        case FieldScope::certified_over_closure: return "certified_over_closure";
        case FieldScope::field_incomplete: return "field_incomplete";
    }
    throw std::logic_error("unreachable");
}

template <class F>
struct ElementarityWitness {
    enum class Kind { generator, generator_pair, submodule };
    Kind kind = Kind::generator;
    std::vector<typename F::Elem> m1, m2;      // generator / generator_pair
    std::optional<SubmoduleWitness<F>> sub;    // submodule
    DimVec sub_dim{};                          // dims of the submodule witness
};

template <class F>
struct ElementarityReport {
    Verdict verdict = Verdict::inconclusive;
    std::string criterion; // rank_small_x | two_condition_mid_x | regular_split | oracle
    std::optional<ElementarityWitness<F>> witness;
    FieldScope field_scope = FieldScope::certified_over_fp;
};

/// Single-generator rank criterion, valid for (x,y) in F with x <= n-1:
/// elementary exactly when every nonzero m in M1 has stacked rank y. Rank is
/// scale invariant, so one representative per projective point suffices over
/// F_p. Over the rationals all nonzero {0,1} patterns are tried: a failing
/// witness is definitive, an all-pass is flagged field_incomplete.
template <class F>
ElementarityReport<F> check_rank_criterion_small_x(const KroneckerRep<F>& r,
                                                   std::uint64_t cap = std::uint64_t{1} << 22) {
    validate(r);
    const DimVec d = r.dim();
    if (!in_fundamental_domain(r.quiver, d))
        throw PreconditionError("rank criterion needs (x,y) in the fundamental domain");
    if (d.x < 1 || d.x > r.quiver.n - 1)
        throw PreconditionError("rank criterion needs 1 <= x <= n-1, got x = " +
                                std::to_string(d.x));
    ElementarityReport<F> rep;
    rep.criterion = "rank_small_x";
    const std::size_t y = r.d2;

    auto test_vector = [&](const std::vector<typename F::Elem>& m) {
        if (rank(stacked_matrix(r, m)) == y) return true;
        ElementarityWitness<F> w;
        w.kind = ElementarityWitness<F>::Kind::generator;
        w.m1 = m;
        rep.verdict = Verdict::not_elementary;
        rep.witness = std::move(w);
        rep.field_scope = FieldScope::certified_over_closure; // a rank defect survives extension
        return false;
    };

    if constexpr (std::is_same_v<F, PrimeField>) {
        const std::uint64_t points = projective_point_count(r.field.modulus(), r.d1);
        if (points > cap)
            throw CapExceeded("rank criterion would enumerate " + std::to_string(points) +
                              " projective points, cap is " + std::to_string(cap));
        if (for_each_projective_point(r.field, r.d1, test_vector)) {
            rep.verdict = Verdict::elementary;
            rep.field_scope = FieldScope::certified_over_fp;
        }
    } else {
        if ((std::uint64_t{1} << r.d1) - 1 > cap)
            throw CapExceeded("rank criterion pattern enumeration exceeds cap");
        if (for_each_01_pattern(r.field, r.d1, test_vector)) {
            rep.verdict = Verdict::elementary;
            rep.field_scope = FieldScope::field_incomplete;
        }
    }
    return rep;
}

/// Two-condition criterion for a module of dimension vector (y, x) with
/// (x,y) in F and n < x < 2n: (a) every nonzero m generates a (1,n)
/// submodule; (b) every independent pair generates a (2,x) submodule.
template <class F>
ElementarityReport<F> check_two_condition_mid_x(const KroneckerRep<F>& r,
                                                std::uint64_t cap = std::uint64_t{1} << 22) {
    validate(r);
    const std::int64_t y = static_cast<std::int64_t>(r.d1);
    const std::int64_t x = static_cast<std::int64_t>(r.d2);
    if (!in_fundamental_domain(r.quiver, DimVec{x, y}))
        throw PreconditionError("two-condition criterion needs (x,y) in the fundamental domain "
                                "for a module of dimension vector (y,x)");
    if (!(r.quiver.n < x && x < 2 * r.quiver.n))
        throw PreconditionError("two-condition criterion needs n < x < 2n, got x = " +
                                std::to_string(x));
    if constexpr (!std::is_same_v<F, PrimeField>) {
        throw PreconditionError("two-condition criterion enumerates projective points and needs "
                                "a prime field");
    } else {
        const std::uint64_t points = projective_point_count(r.field.modulus(), r.d1);
        if (points > cap || (points * points) / 2 > cap)
            throw CapExceeded("two-condition criterion would enumerate ~" +
                              std::to_string(points * points / 2) + " pairs, cap is " +
                              std::to_string(cap));
        ElementarityReport<F> rep;
        rep.criterion = "two_condition_mid_x";
        const std::size_t n = static_cast<std::size_t>(r.quiver.n);

        // (a) single generators
        bool ok = for_each_projective_point(r.field, r.d1, [&](const auto& m) {
            if (rank(stacked_matrix(r, m)) == n) return true;
            ElementarityWitness<F> w;
            w.kind = ElementarityWitness<F>::Kind::generator;
            w.m1 = m;
            rep.verdict = Verdict::not_elementary;
            rep.witness = std::move(w);
            rep.field_scope = FieldScope::certified_over_fp;
            return false;
        });
        if (!ok) return rep;

        // (b) independent pairs; the stacked rank depends only on the span
        std::vector<std::vector<PrimeField::Elem>> pts;
        for_each_projective_point(r.field, r.d1, [&](const auto& m) {
            pts.push_back(m);
            return true;
        });
        for (std::size_t i = 0; i < pts.size() && ok; ++i)
            for (std::size_t j = i + 1; j < pts.size() && ok; ++j) {
                Matrix<F> span(r.field, r.d1, 2);
                for (std::size_t t = 0; t < r.d1; ++t) {
                    span(t, 0) = pts[i][t];
                    span(t, 1) = pts[j][t];
                }
                if (rank(span) < 2) continue;
                if (rank(stacked_matrix(r, {pts[i], pts[j]})) ==
                    static_cast<std::size_t>(x))
                    continue;
                ElementarityWitness<F> w;
                w.kind = ElementarityWitness<F>::Kind::generator_pair;
                w.m1 = pts[i];
                w.m2 = pts[j];
                rep.verdict = Verdict::not_elementary;
                rep.witness = std::move(w);
                rep.field_scope = FieldScope::certified_over_fp;
                ok = false;
            }
        if (!ok) return rep;
        rep.verdict = Verdict::elementary;
        rep.field_scope = FieldScope::certified_over_fp;
        return rep;
    }
}

struct SplitCaps {
    std::size_t max_d1 = 4;
    std::uint64_t max_p = 3;
    std::uint64_t max_submodules = 200'000;
};

namespace detail {

/// Enumerates every proper nonzero submodule (U1, U2) of r: U1 runs over the
/// subspaces of M1, U2 over subspaces of M2 containing the image span of U1
/// (parameterized by subspaces of a complement of that span). fn returns
/// false to stop.
template <class Fn>
bool for_each_submodule(const KroneckerRep<PrimeField>& r, const SplitCaps& caps, Fn&& fn) {
    std::uint64_t visited = 0;
    return for_each_subspace(r.field, r.d1, [&](const Matrix<PrimeField>& u1) {
        Matrix<PrimeField> images(r.field, r.d2, 0);
        for (const auto& m : r.maps)
            if (u1.cols() > 0) images = hconcat(images, m * u1);
        Matrix<PrimeField> min2 = column_space_basis(images);
        const std::size_t q = r.d2 - min2.cols();
        Matrix<PrimeField> comp(r.field, r.d2, q);
        {
            const auto idx = complement_pivots(min2);
            for (std::size_t j = 0; j < q; ++j) comp(idx[j], j) = 1;
        }
        return for_each_subspace(r.field, q, [&](const Matrix<PrimeField>& s) {
            Matrix<PrimeField> u2 = hconcat(min2, comp * s);
            const std::size_t du1 = u1.cols(), du2 = u2.cols();
            if (du1 == 0 && du2 == 0) return true;             // zero submodule
            if (du1 == r.d1 && du2 == r.d2) return true;       // the module itself
            if (++visited > caps.max_submodules)
                throw CapExceeded("submodule enumeration exceeded " +
                                  std::to_string(caps.max_submodules));
            return fn(SubmoduleWitness<PrimeField>{u1, u2});
        });
    });
}

} // namespace detail

/// Obstruction search: a proper nonzero submodule whose dimension vector and
/// quotient dimension vector are both regular rules out elementarity. Finding
/// none is only inconclusive, the obstruction is one-directional.
template <class F>
ElementarityReport<F> check_regular_split_obstruction(const KroneckerRep<F>& r,
                                                      const SplitCaps& caps = {}) {
    validate(r);
    if constexpr (!std::is_same_v<F, PrimeField>) {
        throw PreconditionError("split obstruction enumerates subspaces and needs a prime field");
    } else {
        if (regularity_test(r) != Regularity::regular)
            throw PreconditionError("split obstruction expects a regular module");
        if (r.d1 > caps.max_d1)
            throw CapExceeded("split obstruction capped at d1 <= " + std::to_string(caps.max_d1) +
                              ", got " + std::to_string(r.d1));
        if (r.field.modulus() > caps.max_p)
            throw CapExceeded("split obstruction capped at p <= " + std::to_string(caps.max_p));
        ElementarityReport<F> rep;
        rep.criterion = "regular_split";
        detail::for_each_submodule(r, caps, [&](SubmoduleWitness<PrimeField> w) {
            const DimVec du = w.dim();
            const DimVec dq{r.dim().x - du.x, r.dim().y - du.y};
            if (quadratic_form(r.quiver, du) < 0 && quadratic_form(r.quiver, dq) < 0) {
                ElementarityWitness<F> ew;
                ew.kind = ElementarityWitness<F>::Kind::submodule;
                ew.sub_dim = du;
                ew.sub = std::move(w);
                rep.verdict = Verdict::not_elementary;
                rep.witness = std::move(ew);
                rep.field_scope = FieldScope::certified_over_closure; // the split persists
                return false;
            }
            return true;
        });
        if (rep.verdict != Verdict::not_elementary) {
            rep.verdict = Verdict::inconclusive;
            rep.field_scope = FieldScope::certified_over_fp;
        }
        return rep;
    }
}

/// Sufficient companion to the obstruction: for a regular module, if every
/// proper nonzero submodule with dim U1 >= 1 has a regular dimension vector
/// and a preinjective-side quotient dimension vector, elementarity follows
/// (the only candidate kernels of a violating exact sequence are ruled out).
/// Returns elementary, not_elementary (a split was found on the way), or
/// inconclusive when neither pattern holds.
template <class F>
ElementarityReport<F> check_submodule_pattern_sufficiency(const KroneckerRep<F>& r,
                                                          const SplitCaps& caps = {}) {
    validate(r);
    if constexpr (!std::is_same_v<F, PrimeField>) {
        throw PreconditionError("sufficiency check enumerates subspaces and needs a prime field");
    } else {
        if (regularity_test(r) != Regularity::regular)
            throw PreconditionError("sufficiency check expects a regular module");
        if (r.d1 > caps.max_d1)
            throw CapExceeded("sufficiency check capped at d1 <= " + std::to_string(caps.max_d1));
        if (r.field.modulus() > caps.max_p)
            throw CapExceeded("sufficiency check capped at p <= " + std::to_string(caps.max_p));
        ElementarityReport<F> rep;
        rep.criterion = "regular_split";
        bool pattern = true;
        detail::for_each_submodule(r, caps, [&](SubmoduleWitness<PrimeField> w) {
            const DimVec du = w.dim();
            const DimVec dq{r.dim().x - du.x, r.dim().y - du.y};
            if (quadratic_form(r.quiver, du) < 0 && quadratic_form(r.quiver, dq) < 0) {
                ElementarityWitness<F> ew;
                ew.kind = ElementarityWitness<F>::Kind::submodule;
                ew.sub_dim = du;
                ew.sub = std::move(w);
                rep.verdict = Verdict::not_elementary;
                rep.witness = std::move(ew);
                rep.field_scope = FieldScope::certified_over_closure;
                return false;
            }
            if (du.x >= 1 && !(quadratic_form(r.quiver, du) < 0 &&
                               classify(r.quiver, dq) == DimVecClass::preinjective_side))
                pattern = false;
            return true;
        });
        if (rep.verdict == Verdict::not_elementary) return rep;
        rep.verdict = pattern ? Verdict::elementary : Verdict::inconclusive;
        rep.field_scope = FieldScope::certified_over_fp;
        return rep;
    }
}

/// The span of the generator stacks A_i = stacked_matrix(r, {e_i}).
template <class F>
struct VSpace {
    std::vector<Matrix<F>> stacks;
    std::size_t dim = 0;
};

template <class F>
VSpace<F> build_v_space(const KroneckerRep<F>& r) {
    validate(r);
    if (r.d1 == 0) throw PreconditionError("V-space needs d1 >= 1");
    VSpace<F> v;
    for (std::size_t i = 0; i < r.d1; ++i) {
        std::vector<typename F::Elem> e(r.d1, r.field.zero());
        e[i] = r.field.one();
        v.stacks.push_back(stacked_matrix(r, e));
    }
    v.dim = rank(flatten_to_rows(v.stacks));
    return v;
}

/// Westwick's sandwich for the maximal dimension l(r, j, i) of a constant
/// rank-r space inside the j x i matrices: returns (i-r+1, i+j-2r+1).
inline std::pair<std::int64_t, std::int64_t> westwick_bounds(std::int64_t r, std::int64_t j,
                                                             std::int64_t i) {
    if (!(2 <= r && r <= j && j <= i))
        throw PreconditionError("Westwick bounds need 2 <= r <= j <= i");
    return {i - r + 1, i + j - 2 * r + 1};
}

template <class F>
struct ConstantRankResult {
    bool ok = true;
    std::optional<Matrix<F>> witness;                  // a combination with the wrong rank
    std::vector<typename F::Elem> witness_coeffs;      // its coefficients over the basis
};

/// True iff every nonzero element of the span has the expected rank, checked
/// over one representative per projective point of a basis of the span.
template <class F>
ConstantRankResult<F> verify_constant_rank_space(const VSpace<F>& v, std::size_t expected_rank,
                                                 std::uint64_t cap = std::uint64_t{1} << 22) {
    if constexpr (!std::is_same_v<F, PrimeField>) {
        throw PreconditionError("constant-rank verification enumerates points and needs a prime "
                                "field");
    } else {
        if (v.stacks.empty()) throw PreconditionError("empty matrix space");
        const PrimeField field = v.stacks.front().field();
        // greedy independent sub-list, so zero combinations are never tested
        std::vector<Matrix<F>> basis;
        {
            std::vector<Matrix<F>> acc;
            std::size_t cur = 0;
            for (const auto& s : v.stacks) {
                acc.push_back(s);
                const std::size_t rk = rank(flatten_to_rows(acc));
                if (rk > cur) {
                    basis.push_back(s);
                    cur = rk;
                } else {
                    acc.pop_back();
                }
            }
        }
        const std::uint64_t points = projective_point_count(field.modulus(), basis.size());
        if (points > cap)
            throw CapExceeded("constant-rank check would enumerate " + std::to_string(points) +
                              " points, cap is " + std::to_string(cap));
        ConstantRankResult<F> res;
        for_each_projective_point(field, basis.size(), [&](const auto& coeffs) {
            Matrix<F> combo(field, basis.front().rows(), basis.front().cols());
            for (std::size_t i = 0; i < basis.size(); ++i)
                if (coeffs[i]) combo = combo + basis[i].scaled(coeffs[i]);
            if (rank(combo) != expected_rank) {
                res.ok = false;
                res.witness = std::move(combo);
                res.witness_coeffs = coeffs;
                return false;
            }
            return true;
        });
        return res;
    }
}

} // namespace kron
