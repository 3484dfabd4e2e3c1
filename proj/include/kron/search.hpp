#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "kron/dimvec.hpp"
#include "kron/elementary.hpp"
#include "kron/errors.hpp"
#include "kron/functors.hpp"
#include "kron/rep.hpp"

namespace kron {

struct SearchCaps {
    std::uint64_t max_candidates = std::uint64_t{1} << 26;
    /// Upper bound on the survivor count fed to isomorphism classing.
    std::uint64_t max_iso_class_size = std::uint64_t{1} << 20;
    /// Candidates per work chunk; a checkpoint is written after every chunk.
    std::uint64_t chunk = std::uint64_t{1} << 20;
};

struct SearchSpec {
    QuiverParam quiver;
    std::uint64_t p = 2;
    DimVec dim{1, 1}; // (d1, d2)
    std::string criterion = "small-x"; // small-x | mid-x | split
    SearchCaps caps;
    int workers = 1;
    bool force_large = false;
    std::string checkpoint_path; // empty disables checkpointing
};

struct IsoClass {
    std::uint64_t representative_counter = 0;
    KroneckerRep<PrimeField> representative;
    std::uint64_t size = 0;
    bool matches_x = false;
};

struct SearchResult {
    SearchSpec spec;
    std::uint64_t total_enumerated = 0;
    std::uint64_t passed_criterion = 0;
    std::vector<std::uint64_t> survivors; // counters, ascending
    std::vector<IsoClass> classes;
    double elapsed_seconds = 0.0;
};

namespace detail {

inline std::uint64_t entry_count(const SearchSpec& s) {
    return static_cast<std::uint64_t>(s.quiver.n) * static_cast<std::uint64_t>(s.dim.x) *
           static_cast<std::uint64_t>(s.dim.y);
}

/// p^(n*d1*d2) with the counter kept below 2^62.
inline std::uint64_t candidate_count(const SearchSpec& s) {
    return pow_u64_checked(s.p, entry_count(s), std::uint64_t{1} << 62);
}

/// Counter digits are the flattened entries, first map's (0,0) entry most
/// significant, maps then rows then columns.
inline KroneckerRep<PrimeField> decode_candidate(const SearchSpec& s, std::uint64_t counter) {
    const PrimeField field(s.p);
    KroneckerRep<PrimeField> r =
        zero_rep(s.quiver, field, static_cast<std::size_t>(s.dim.x),
                 static_cast<std::size_t>(s.dim.y));
    const std::uint64_t entries = entry_count(s);
    for (std::uint64_t k = 0; k < entries; ++k) {
        const std::uint64_t idx = entries - 1 - k; // least significant digit last
        const std::uint64_t digit = counter % s.p;
        counter /= s.p;
        const std::size_t map_i = idx / (r.d1 * r.d2);
        const std::size_t rest = idx % (r.d1 * r.d2);
        r.maps[map_i](rest / r.d1, rest % r.d1) = digit;
    }
    return r;
}

inline std::uint64_t encode_candidate(const SearchSpec& s, const KroneckerRep<PrimeField>& r) {
    std::uint64_t counter = 0;
    for (const auto& m : r.maps)
        for (std::size_t row = 0; row < r.d2; ++row)
            for (std::size_t col = 0; col < r.d1; ++col)
                counter = counter * s.p + m(row, col);
    return counter;
}

inline void validate_criterion_preconditions(const SearchSpec& s) {
    const DimVec d = s.dim;
    if (d.x < 0 || d.y < 0 || (d.x == 0 && d.y == 0))
        throw PreconditionError("search dimension vector must be nonzero and nonnegative");
    if (s.criterion == "small-x") {
        if (!in_fundamental_domain(s.quiver, d) || d.x < 1 || d.x > s.quiver.n - 1)
            throw PreconditionError("small-x criterion needs (x,y) in F with 1 <= x <= n-1");
    } else if (s.criterion == "mid-x") {
        const DimVec swapped{d.y, d.x};
        if (!in_fundamental_domain(s.quiver, swapped) ||
            !(s.quiver.n < d.y && d.y < 2 * s.quiver.n))
            throw PreconditionError(
                "mid-x criterion needs dimension vector (y,x) with (x,y) in F and n < x < 2n");
    } else if (s.criterion != "split") {
        throw PreconditionError("unknown criterion '" + s.criterion +
                                "' (expected small-x, mid-x or split)");
    }
}

inline bool candidate_passes(const SearchSpec& s, const KroneckerRep<PrimeField>& r) {
    if (s.criterion == "small-x")
        return check_rank_criterion_small_x(r).verdict == Verdict::elementary;
    if (s.criterion == "mid-x")
        return check_two_condition_mid_x(r).verdict == Verdict::elementary;
    // split: regular and not ruled out by the obstruction
    if (regularity_test(r) != Regularity::regular) return false;
    return check_regular_split_obstruction(r).verdict == Verdict::inconclusive;
}

/// Invariant fingerprint cutting down pairwise isomorphism tests: the sorted
/// map ranks plus the sorted single-generator stack ranks.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> iso_fingerprint(
    const KroneckerRep<PrimeField>& r) {
    std::vector<std::size_t> map_ranks;
    for (const auto& m : r.maps) map_ranks.push_back(rank(m));
    std::sort(map_ranks.begin(), map_ranks.end());
    std::vector<std::size_t> gen_ranks;
    for_each_projective_point(r.field, r.d1, [&](const auto& m) {
        gen_ranks.push_back(rank(stacked_matrix(r, m)));
        return true;
    });
    std::sort(gen_ranks.begin(), gen_ranks.end());
    return {std::move(map_ranks), std::move(gen_ranks)};
}

struct CheckpointState {
    std::uint64_t next = 0;
    std::vector<std::uint64_t> survivors;
};

inline nlohmann::json checkpoint_fingerprint(const SearchSpec& s) {
    return nlohmann::json{{"n", s.quiver.n},
                          {"p", s.p},
                          {"dim", {s.dim.x, s.dim.y}},
                          {"criterion", s.criterion}};
}

inline void write_checkpoint(const SearchSpec& s, const CheckpointState& st) {
    nlohmann::json j{{"schema_version", 1},
                     {"kind", "search_checkpoint"},
                     {"spec", checkpoint_fingerprint(s)},
                     {"next", st.next},
                     {"survivors", st.survivors}};
    std::ofstream out(s.checkpoint_path, std::ios::trunc);
    if (!out) throw PreconditionError("cannot write checkpoint file " + s.checkpoint_path);
    out << j.dump() << '\n';
}

inline std::optional<CheckpointState> read_checkpoint(const SearchSpec& s) {
    std::ifstream in(s.checkpoint_path);
    if (!in) return std::nullopt;
    nlohmann::json j;
    in >> j;
    if (j.value("kind", "") != "search_checkpoint" ||
        j.at("spec") != checkpoint_fingerprint(s))
        throw PreconditionError("checkpoint file " + s.checkpoint_path +
                                " belongs to a different search");
    CheckpointState st;
    st.next = j.at("next").get<std::uint64_t>();
    st.survivors = j.at("survivors").get<std::vector<std::uint64_t>>();
    return st;
}

} // namespace detail

/// Enumerates every candidate tuple of maps in counter order, applies the
/// named criterion, and groups survivors into isomorphism classes. The output
/// is deterministic for a given spec: survivors are visited in counter order
/// and workers only split disjoint counter ranges whose results are merged
/// back in order.
inline SearchResult enumerate_and_filter(const SearchSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::validate_criterion_preconditions(spec);
    const std::uint64_t total = detail::candidate_count(spec);
    if (!spec.force_large && total > spec.caps.max_candidates)
        throw CapExceeded("search space has " + std::to_string(total) +
                          " candidates, cap is " + std::to_string(spec.caps.max_candidates) +
                          " (pass force_large to run anyway)");

    detail::CheckpointState st;
    if (!spec.checkpoint_path.empty()) {
        if (auto resumed = detail::read_checkpoint(spec)) st = *resumed;
    }

    const int workers = spec.workers > 0 ? spec.workers : 1;
    while (st.next < total) {
        const std::uint64_t lo = st.next;
        const std::uint64_t hi = std::min(total, lo + spec.caps.chunk);
        std::vector<std::vector<std::uint64_t>> found(static_cast<std::size_t>(workers));
        const std::uint64_t span = hi - lo;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t a = lo + span * w / workers;
            const std::uint64_t b = lo + span * (w + 1) / workers;
            pool.emplace_back([&, w, a, b] {
                for (std::uint64_t c = a; c < b; ++c)
                    if (detail::candidate_passes(spec, detail::decode_candidate(spec, c)))
                        found[static_cast<std::size_t>(w)].push_back(c);
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& f : found) st.survivors.insert(st.survivors.end(), f.begin(), f.end());
        st.next = hi;
        if (!spec.checkpoint_path.empty()) detail::write_checkpoint(spec, st);
    }

    if (st.survivors.size() > spec.caps.max_iso_class_size)
        throw CapExceeded("survivor count " + std::to_string(st.survivors.size()) +
                          " exceeds the isomorphism-classing cap " +
                          std::to_string(spec.caps.max_iso_class_size));

    SearchResult res{spec, 0, 0, {}, {}, 0.0};
    res.total_enumerated = total;
    res.passed_criterion = st.survivors.size();
    res.survivors = st.survivors;

    // the X counter, when the classification theorem's case applies
    std::optional<std::uint64_t> x_counter;
    if (spec.dim.x >= 1 && spec.dim.y >= 1 && spec.dim.x + spec.dim.y == spec.quiver.n + 1)
        x_counter = detail::encode_candidate(
            spec, make_x(spec.quiver, spec.dim.x, spec.dim.y, PrimeField(spec.p)));

    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>,
             std::vector<std::size_t>>
        buckets;
    for (const std::uint64_t c : st.survivors) {
        KroneckerRep<PrimeField> rep = detail::decode_candidate(spec, c);
        auto fp = detail::iso_fingerprint(rep);
        std::size_t assigned = res.classes.size();
        for (std::size_t idx : buckets[fp]) {
            if (is_isomorphic(rep, res.classes[idx].representative)) {
                assigned = idx;
                break;
            }
        }
        if (assigned == res.classes.size()) {
            buckets[fp].push_back(assigned);
            res.classes.push_back(IsoClass{c, std::move(rep), 0, false});
        }
        res.classes[assigned].size += 1;
        if (x_counter && c == *x_counter) res.classes[assigned].matches_x = true;
    }

    if (!spec.checkpoint_path.empty()) {
        std::error_code ec;
        std::filesystem::remove(spec.checkpoint_path, ec); // finished, drop the resume file
    }
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

struct SurveyRow {
    std::int64_t x = 0, y = 0;
    bool passes = false;
    std::vector<std::string> violated;
};

struct SurveyReport {
    int n = 3;
    std::int64_t x_max = 0;
    std::vector<SurveyRow> rows;
    std::uint64_t total = 0, passed = 0;
    bool small_x_survivors_match = true;   // survivors with x < n are exactly {x+y <= n+1}
    bool mid_range_bounded = true;         // survivors with n < x < 2n obey y^2-y+2x <= 4n+2
    bool no_survivor_x_ge_2n = true;
    bool no_survivor_y_ge_2n_minus_2 = true;
};

/// Walks all of F up to x_max through the necessary-condition filters and
/// cross-checks the survivor set against the closed-form descriptions.
inline SurveyReport verify_filters_survey(QuiverParam q, std::int64_t x_max) {
    SurveyReport rep;
    rep.n = q.n;
    rep.x_max = x_max;
    const std::int64_t n = q.n;
    for (std::int64_t x = 1; x <= x_max; ++x) {
        for (std::int64_t y = 1; y <= x; ++y) {
            const DimVec v{x, y};
            if (!in_fundamental_domain(q, v)) continue;
            FilterReport f = elementary_filters(q, v);
            rep.rows.push_back(SurveyRow{x, y, f.passes, f.violated});
            rep.total += 1;
            if (!f.passes) continue;
            rep.passed += 1;
            if (x >= 2 * n) rep.no_survivor_x_ge_2n = false;
            if (y >= 2 * (n - 1)) rep.no_survivor_y_ge_2n_minus_2 = false;
            if (n < x && x < 2 * n && !(y * y - y + 2 * x <= 4 * n + 2))
                rep.mid_range_bounded = false;
        }
    }
    for (const auto& row : rep.rows) {
        if (row.x >= n) continue;
        const bool expected = row.x + row.y <= n + 1;
        if (row.passes != expected) rep.small_x_survivors_match = false;
    }
    return rep;
}

struct WestwickEntry {
    int n = 0;
    std::int64_t x = 0, y = 0;
    std::uint64_t p = 0;
    std::size_t dim_vx = 0;
    std::int64_t expected_dim = 0;
    std::int64_t lower = 0, upper = 0;
    bool constant_rank_ok = false;
    bool ok = false;
};

struct WestwickReport {
    std::vector<WestwickEntry> entries;
    bool all_ok = true;
};

/// For every (x,y) in F with x+y = n+1 the generator stacks of X(x,y) span a
/// space of dimension x = n+1-y in which every nonzero element has rank y;
/// both Westwick bounds collapse to n+1-y there.
inline WestwickReport verify_westwick_for_x(int n_min, int n_max,
                                            const std::vector<std::uint64_t>& primes) {
    WestwickReport rep;
    for (int n = n_min; n <= n_max; ++n) {
        const QuiverParam q(n);
        for (std::int64_t x = 1; x <= n; ++x) {
            const std::int64_t y = n + 1 - x;
            if (y < 1 || !in_fundamental_domain(q, DimVec{x, y})) continue;
            const auto [lo, hi] = westwick_bounds(y, y, n);
            for (const std::uint64_t p : primes) {
                WestwickEntry e;
                e.n = n;
                e.x = x;
                e.y = y;
                e.p = p;
                e.lower = lo;
                e.upper = hi;
                e.expected_dim = n + 1 - y;
                const PrimeField field(p);
                auto vx = build_v_space(make_x(q, x, y, field));
                e.dim_vx = vx.dim;
                e.constant_rank_ok =
                    verify_constant_rank_space(vx, static_cast<std::size_t>(y)).ok;
                e.ok = e.constant_rank_ok && e.dim_vx == static_cast<std::size_t>(e.expected_dim) &&
                       lo == hi && lo == e.expected_dim;
                rep.all_ok = rep.all_ok && e.ok;
                rep.entries.push_back(std::move(e));
            }
        }
    }
    return rep;
}

struct ClassificationEntry {
    DimVec dim;
    bool ran = false;
    std::uint64_t candidate_count = 0;
    std::optional<SearchResult> result;
    bool x_class_present = false;
    std::uint64_t extra_classes = 0;
};

struct ClassificationReport {
    int n = 3;
    std::uint64_t p = 2;
    std::vector<ClassificationEntry> entries;
};

/// Runs the small-x search at every (x,y) in F with x+y = n+1 that fits under
/// the caps; oversized spaces are reported with their exact candidate count
/// instead of failing the whole experiment. Extra survivor classes beyond the
/// X class are reported, not asserted away.
inline ClassificationReport classification_experiment(QuiverParam q, std::uint64_t p,
                                                      const SearchCaps& caps = {},
                                                      int workers = 1) {
    ClassificationReport rep;
    rep.n = q.n;
    rep.p = p;
    for (std::int64_t x = 1; x <= q.n; ++x) {
        const std::int64_t y = q.n + 1 - x;
        if (y < 1 || y > x || !in_fundamental_domain(q, DimVec{x, y})) continue;
        ClassificationEntry e;
        e.dim = DimVec{x, y};
        SearchSpec spec{q, p, e.dim, "small-x", caps, workers, false, ""};
        e.candidate_count = detail::candidate_count(spec);
        if (e.candidate_count > caps.max_candidates) {
            rep.entries.push_back(std::move(e));
            continue;
        }
        e.result = enumerate_and_filter(spec);
        e.ran = true;
        for (const auto& cls : e.result->classes) {
            if (cls.matches_x)
                e.x_class_present = true;
            else
                e.extra_classes += 1;
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

} // namespace kron
