#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kron/errors.hpp"

namespace kron {

namespace detail {

inline std::int64_t mul_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw PreconditionError("dimension-vector arithmetic overflow");
    return r;
}

inline std::int64_t add_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw PreconditionError("dimension-vector arithmetic overflow");
    return r;
}

inline std::int64_t sub_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw PreconditionError("dimension-vector arithmetic overflow");
    return r;
}

} // namespace detail

/// Arrow count of the generalized Kronecker quiver K(n). Everything here
/// assumes n >= 3 (the n <= 2 cases are tame and out of scope).
struct QuiverParam {
    int n;

    explicit QuiverParam(int n_) : n(n_) {
        if (n < 3 || n > 64)
            throw PreconditionError("quiver parameter must satisfy 3 <= n <= 64, got " +
                                    std::to_string(n_));
    }
    bool operator==(const QuiverParam&) const = default;
};

/// Dimension vector (dim M1, dim M2). Signed, because reflection images may
/// leave the nonnegative quadrant.
struct DimVec {
    std::int64_t x = 0, y = 0;

    bool operator==(const DimVec&) const = default;
    bool nonnegative() const { return x >= 0 && y >= 0; }
    bool is_zero() const { return x == 0 && y == 0; }
    DimVec operator+(DimVec o) const {
        return {detail::add_i64(x, o.x), detail::add_i64(y, o.y)};
    }
};

/// <a,b> = a.x b.x + a.y b.y - n a.x b.y
inline std::int64_t euler_form(QuiverParam q, DimVec a, DimVec b) {
    using namespace detail;
    return sub_i64(add_i64(mul_i64(a.x, b.x), mul_i64(a.y, b.y)),
                   mul_i64(q.n, mul_i64(a.x, b.y)));
}

/// q(v) = <v,v> = x^2 + y^2 - n x y
inline std::int64_t quadratic_form(QuiverParam q, DimVec v) { return euler_form(q, v, v); }

inline DimVec sigma(QuiverParam q, DimVec v) {
    return {detail::sub_i64(detail::mul_i64(q.n, v.x), v.y), v.x};
}

inline DimVec sigma_inv(QuiverParam q, DimVec v) {
    return {v.y, detail::sub_i64(detail::mul_i64(q.n, v.y), v.x)};
}

inline DimVec delta(DimVec v) { return {v.y, v.x}; }

enum class Gen { sigma, sigma_inv, delta };

inline DimVec apply_gen(QuiverParam q, Gen g, DimVec v) {
    switch (g) {
        case Gen::sigma: return sigma(q, v);
        case Gen::sigma_inv: return sigma_inv(q, v);
        case Gen::delta: return delta(v);
    }
    throw std::logic_error("unreachable");
}

inline Gen inverse_gen(Gen g) {
    switch (g) {
        case Gen::sigma: return Gen::sigma_inv;
        case Gen::sigma_inv: return Gen::sigma;
        case Gen::delta: return Gen::delta;
    }
    throw std::logic_error("unreachable");
}

/// Word of generators applied during a fundamental-domain reduction, stored in
/// application order. Replayable in both directions: forward repeats the
/// reduction, inverse recovers the original vector from the reduced one.
struct ReductionTrace {
    std::vector<Gen> word;

    DimVec replay_forward(QuiverParam q, DimVec v) const {
        for (Gen g : word) v = apply_gen(q, g, v);
        return v;
    }
    DimVec replay_inverse(QuiverParam q, DimVec w) const {
        for (auto it = word.rbegin(); it != word.rend(); ++it)
            w = apply_gen(q, inverse_gen(*it), w);
        return w;
    }
};

enum class DimVecClass { zero, regular, preprojective_side, preinjective_side };

/// Exact integer test for y/x > (n + sqrt(n^2-4))/2, the slope separating the
/// two q >= 0 cones. x = 0 counts as infinite slope.
inline bool above_preprojective_slope(QuiverParam q, DimVec v) {
    if (v.x == 0) return v.y > 0;
    if (v.x < 0) throw PreconditionError("slope test expects x >= 0");
    using namespace detail;
    const std::int64_t l = sub_i64(mul_i64(2, v.y), mul_i64(q.n, v.x));
    if (l <= 0) return false;
    // l/x > sqrt(n^2-4) with both sides positive
    return mul_i64(l, l) > mul_i64(mul_i64(q.n, q.n) - 4, mul_i64(v.x, v.x));
}

/// Cone classification of a nonnegative vector. The sides are cones of the
/// quadratic form, not existence statements about modules; the convention is
/// anchored by (1, n) (dim P(1)) landing on the preprojective side and (x, 0)
/// on the preinjective side.
inline DimVecClass classify(QuiverParam q, DimVec v) {
    if (!v.nonnegative()) throw PreconditionError("classify expects nonnegative entries");
    if (v.is_zero()) return DimVecClass::zero;
    if (quadratic_form(q, v) < 0) return DimVecClass::regular;
    return above_preprojective_slope(q, v) ? DimVecClass::preprojective_side
                                           : DimVecClass::preinjective_side;
}

/// F = {(x,y) : (2/n) x <= y <= x}, tested in integers as n y >= 2 x.
inline bool in_fundamental_domain(QuiverParam q, DimVec v) {
    return detail::mul_i64(q.n, v.y) >= detail::mul_i64(2, v.x) && v.y <= v.x;
}

/// Reduces a regular vector into F. Outside F with y <= x the inverse
/// reflection strictly decreases x+y on regular vectors, which gives
/// termination; the iteration cap is a defensive backstop only.
inline std::pair<DimVec, ReductionTrace> reduce_to_fundamental_domain(QuiverParam q, DimVec v) {
    if (classify(q, v) != DimVecClass::regular)
        throw PreconditionError("fundamental-domain reduction expects a regular vector");
    ReductionTrace trace;
    DimVec cur = v;
    for (int iter = 0; iter < 1'000'000; ++iter) {
        if (in_fundamental_domain(q, cur)) return {cur, trace};
        Gen g;
        if (cur.y > cur.x) {
            g = Gen::delta;
        } else {
            const DimVec s = sigma_inv(q, cur);
            if (s.x + s.y < cur.x + cur.y) {
                g = Gen::sigma_inv;
            } else {
                g = Gen::sigma;
                const DimVec t = sigma(q, cur);
                if (t.x + t.y >= cur.x + cur.y)
                    throw std::logic_error("reduction made no progress on a regular vector");
            }
        }
        cur = apply_gen(q, g, cur);
        trace.word.push_back(g);
    }
    throw std::logic_error("fundamental-domain reduction exceeded the iteration cap");
}

/// Outcome of the necessary-condition filters on a vector in F. Passing all
/// filters never certifies an elementary dimension vector; it only fails to
/// rule one out.
struct FilterReport {
    bool passes = true;
    std::vector<std::string> violated;

    static constexpr const char* note =
        "necessary conditions only; passing does not certify an elementary dimension vector";
};

/// Applies each filter under its own hypothesis guard:
///   x < n               when x - y <= n - 2
///   y < 2(n-1)          always
///   x < 2n              always
///   y^2 - y + 2x <= 4n+2  when n < x < 2n
///   x + y <= n + 1      when x < n
inline FilterReport elementary_filters(QuiverParam q, DimVec v) {
    if (!in_fundamental_domain(q, v))
        throw PreconditionError("filters are defined on the fundamental domain");
    FilterReport rep;
    const std::int64_t n = q.n, x = v.x, y = v.y;
    auto fail = [&](const char* name) {
        rep.passes = false;
        rep.violated.emplace_back(name);
    };
    if (x - y <= n - 2 && !(x < n)) fail("x<n");
    if (!(y < 2 * (n - 1))) fail("y<2(n-1)");
    if (!(x < 2 * n)) fail("x<2n");
    if (n < x && x < 2 * n && !(y * y - y + 2 * x <= 4 * n + 2)) fail("y^2-y+2x<=4n+2");
    if (x < n && !(x + y <= n + 1)) fail("x+y<=n+1");
    return rep;
}

/// {sigma^t v : t in [t_min, t_max]}, skipping iterates with a negative
/// coordinate.
inline std::vector<DimVec> orbit_sample(QuiverParam q, DimVec v, int t_min, int t_max) {
    if (t_min > t_max) throw PreconditionError("empty orbit range");
    std::vector<DimVec> out;
    // walk down to t_min, then forward
    DimVec cur = v;
    for (int t = 0; t > t_min; --t) cur = sigma_inv(q, cur);
    for (int t = t_min; t <= t_max; ++t) {
        if (t > t_min) cur = sigma(q, cur);
        if (cur.nonnegative()) out.push_back(cur);
    }
    return out;
}

/// True iff some sigma^t v (t in Z) hits (1,0) or (0,1), i.e. v lies on the
/// real-root orbit of an indecomposable preprojective or preinjective.
inline bool is_real_root_orbit(QuiverParam q, DimVec v) {
    if (quadratic_form(q, v) != 1) return false;
    auto probe = [&](bool forward) {
        DimVec cur = v;
        for (int t = 0; t < 512; ++t) {
            if (cur == DimVec{1, 0} || cur == DimVec{0, 1}) return true;
            if (!cur.nonnegative()) return false;
            cur = forward ? sigma(q, cur) : sigma_inv(q, cur);
        }
        return false;
    };
    return probe(true) || probe(false);
}

inline std::string to_string(DimVecClass c) {
    switch (c) {
        case DimVecClass::zero: return "zero";
        case DimVecClass::regular: return "regular";
        case DimVecClass::preprojective_side: return "preprojective_side";
        case DimVecClass::preinjective_side: return "preinjective_side";
    }
    throw std::logic_error("unreachable");
}

inline std::string to_string(Gen g) {
    switch (g) {
        case Gen::sigma: return "sigma";
        case Gen::sigma_inv: return "sigma_inv";
        case Gen::delta: return "delta";
    }
    throw std::logic_error("unreachable");
}

} // namespace kron
