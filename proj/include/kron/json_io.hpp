#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "kron/dimvec.hpp"
#include "kron/elementary.hpp"
#include "kron/errors.hpp"
#include "kron/field.hpp"
#include "kron/matrix.hpp"
#include "kron/rep.hpp"
#include "kron/search.hpp"

namespace kron {

using AnyRep = std::variant<KroneckerRep<PrimeField>, KroneckerRep<RationalField>>;

inline nlohmann::json field_to_json(const FieldSpec& f) {
    if (f.kind == FieldSpec::Kind::prime)
        return nlohmann::json{{"kind", "prime"}, {"p", f.p}};
    return nlohmann::json{{"kind", "rational"}};
}

inline FieldSpec field_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw PreconditionError("field: expected an object with a 'kind' key");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "prime") {
        if (!j.contains("p") || !j.at("p").is_number_unsigned())
            throw PreconditionError("field.p: expected a positive integer");
        return FieldSpec::prime(j.at("p").get<std::uint64_t>());
    }
    if (kind == "rational") return FieldSpec::rational();
    throw PreconditionError("field.kind: expected 'prime' or 'rational', got '" + kind + "'");
}

inline nlohmann::json elem_to_json(const PrimeField& f, PrimeField::Elem e) {
    (void)f;
    return e;
}

/// Rationals serialize as strings: "a" when integral, "a/b" otherwise.
inline nlohmann::json elem_to_json(const RationalField& f, const RationalField::Elem& e) {
    return f.to_string(e);
}

inline PrimeField::Elem elem_from_json(const PrimeField& f, const nlohmann::json& j,
                                       const std::string& where) {
    if (j.is_number_integer()) return f.from_int(j.get<long long>());
    throw PreconditionError(where + ": expected an integer entry");
}

inline RationalField::Elem elem_from_json(const RationalField& f, const nlohmann::json& j,
                                          const std::string& where) {
    if (j.is_number_integer()) return f.from_int(j.get<long long>());
    if (j.is_string()) return f.parse(j.get<std::string>());
    throw PreconditionError(where + ": expected an integer or an 'a/b' string");
}

template <class F>
nlohmann::json matrix_to_json(const Matrix<F>& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(elem_to_json(m.field(), m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class F>
Matrix<F> matrix_from_json(F field, const nlohmann::json& j, std::size_t rows, std::size_t cols,
                           const std::string& where) {
    if (!j.is_array() || j.size() != rows)
        throw PreconditionError(where + ": expected " + std::to_string(rows) + " rows, found " +
                                std::to_string(j.is_array() ? j.size() : 0));
    Matrix<F> m(field, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j.at(r);
        if (!row.is_array() || row.size() != cols)
            throw PreconditionError(where + "[" + std::to_string(r) + "]: expected " +
                                    std::to_string(cols) + " entries, found " +
                                    std::to_string(row.is_array() ? row.size() : 0));
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = elem_from_json(field, row.at(c),
                                     where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                         "]");
    }
    return m;
}

/// The interchange format for representations (the bit-exact file contract):
/// { "n": int, "field": {...}, "dim": [d1, d2], "maps": [matrix, ...] }.
template <class F>
nlohmann::json rep_to_json(const KroneckerRep<F>& r) {
    nlohmann::json maps = nlohmann::json::array();
    for (const auto& m : r.maps) maps.push_back(matrix_to_json(m));
    return nlohmann::json{{"n", r.quiver.n},
                          {"field", field_to_json(spec_of(r.field))},
                          {"dim", {r.d1, r.d2}},
                          {"maps", std::move(maps)}};
}

inline nlohmann::json rep_to_json(const AnyRep& r) {
    return std::visit([](const auto& rep) { return rep_to_json(rep); }, r);
}

inline AnyRep rep_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw PreconditionError("module file: expected a JSON object");
    for (const char* key : {"n", "field", "dim", "maps"})
        if (!j.contains(key)) throw PreconditionError(std::string(key) + ": missing");
    if (!j.at("n").is_number_integer()) throw PreconditionError("n: expected an integer");
    const QuiverParam q(j.at("n").get<int>());
    const FieldSpec fs = field_from_json(j.at("field"));
    const auto& dim = j.at("dim");
    if (!dim.is_array() || dim.size() != 2 || !dim.at(0).is_number_unsigned() ||
        !dim.at(1).is_number_unsigned())
        throw PreconditionError("dim: expected [d1, d2] with nonnegative integers");
    const std::size_t d1 = dim.at(0).get<std::size_t>(), d2 = dim.at(1).get<std::size_t>();
    const auto& maps = j.at("maps");
    if (!maps.is_array() || maps.size() != static_cast<std::size_t>(q.n))
        throw PreconditionError("maps: expected " + std::to_string(q.n) + " matrices, found " +
                                std::to_string(maps.is_array() ? maps.size() : 0));
    return with_field(fs, [&](auto field) -> AnyRep {
        using F = decltype(field);
        KroneckerRep<F> r{q, field, d1, d2, {}};
        for (std::size_t i = 0; i < maps.size(); ++i)
            r.maps.push_back(
                matrix_from_json(field, maps.at(i), d2, d1, "maps[" + std::to_string(i) + "]"));
        validate(r);
        return r;
    });
}

template <class F>
nlohmann::json vector_to_json(const F& field, const std::vector<typename F::Elem>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : v) out.push_back(elem_to_json(field, e));
    return out;
}

template <class F>
nlohmann::json witness_to_json(const F& field, const ElementarityWitness<F>& w) {
    using Kind = typename ElementarityWitness<F>::Kind;
    switch (w.kind) {
        case Kind::generator:
            return nlohmann::json{{"kind", "generator"}, {"m", vector_to_json(field, w.m1)}};
        case Kind::generator_pair:
            return nlohmann::json{{"kind", "generator_pair"},
                                  {"m1", vector_to_json(field, w.m1)},
                                  {"m2", vector_to_json(field, w.m2)}};
        case Kind::submodule:
            return nlohmann::json{{"kind", "submodule"},
                                  {"dim", {w.sub_dim.x, w.sub_dim.y}},
                                  {"basis1", matrix_to_json(w.sub->basis1)},
                                  {"basis2", matrix_to_json(w.sub->basis2)}};
    }
    throw std::logic_error("unreachable");
}

template <class F>
nlohmann::json report_to_json(const F& field, const ElementarityReport<F>& rep) {
    nlohmann::json j{{"verdict", to_string(rep.verdict)},
                     {"criterion", rep.criterion},
                     {"field_scope", to_string(rep.field_scope)}};
    j["witness"] = rep.witness ? witness_to_json(field, *rep.witness) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json search_result_to_json(const SearchResult& res, bool include_elapsed = true) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : res.classes)
        classes.push_back(nlohmann::json{{"counter", c.representative_counter},
                                         {"representative", rep_to_json(c.representative)},
                                         {"size", c.size},
                                         {"matches_X", c.matches_x}});
    nlohmann::json j{{"schema_version", 1},
                     {"spec",
                      {{"n", res.spec.quiver.n},
                       {"p", res.spec.p},
                       {"dim", {res.spec.dim.x, res.spec.dim.y}},
                       {"criterion", res.spec.criterion},
                       {"workers", res.spec.workers}}},
                     {"total_enumerated", res.total_enumerated},
                     {"passed_criterion", res.passed_criterion},
                     {"iso_classes", std::move(classes)}};
    if (include_elapsed) j["elapsed_seconds"] = res.elapsed_seconds;
    return j;
}

inline nlohmann::json survey_to_json(const SurveyReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows)
        rows.push_back(nlohmann::json{
            {"x", r.x}, {"y", r.y}, {"passes", r.passes}, {"violated", r.violated}});
    return nlohmann::json{{"schema_version", 1},
                          {"n", rep.n},
                          {"x_max", rep.x_max},
                          {"rows", std::move(rows)},
                          {"total", rep.total},
                          {"passed", rep.passed},
                          {"assertions",
                           {{"small_x_survivors_match", rep.small_x_survivors_match},
                            {"mid_range_bounded", rep.mid_range_bounded},
                            {"no_survivor_x_ge_2n", rep.no_survivor_x_ge_2n},
                            {"no_survivor_y_ge_2n_minus_2", rep.no_survivor_y_ge_2n_minus_2}}}};
}

inline nlohmann::json westwick_to_json(const WestwickReport& rep) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : rep.entries)
        entries.push_back(nlohmann::json{{"n", e.n},
                                         {"x", e.x},
                                         {"y", e.y},
                                         {"p", e.p},
                                         {"dim_vx", e.dim_vx},
                                         {"expected_dim", e.expected_dim},
                                         {"bounds", {e.lower, e.upper}},
                                         {"constant_rank_ok", e.constant_rank_ok},
                                         {"ok", e.ok}});
    return nlohmann::json{
        {"schema_version", 1}, {"entries", std::move(entries)}, {"all_ok", rep.all_ok}};
}

inline nlohmann::json classification_to_json(const ClassificationReport& rep,
                                             bool include_elapsed = true) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : rep.entries) {
        nlohmann::json ej{{"dim", {e.dim.x, e.dim.y}},
                          {"ran", e.ran},
                          {"candidate_count", e.candidate_count},
                          {"x_class_present", e.x_class_present},
                          {"extra_classes", e.extra_classes}};
        if (e.result) ej["result"] = search_result_to_json(*e.result, include_elapsed);
        entries.push_back(std::move(ej));
    }
    return nlohmann::json{{"schema_version", 1},
                          {"n", rep.n},
                          {"p", rep.p},
                          {"entries", std::move(entries)}};
}

} // namespace kron
