// kronrep: exact computations for representations of the generalized
// Kronecker quiver K(n). JSON in, JSON out; exit codes: 0 success,
// 2 usage or precondition error, 1 internal error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kron/dimvec.hpp"
#include "kron/elementary.hpp"
#include "kron/errors.hpp"
#include "kron/field.hpp"
#include "kron/functors.hpp"
#include "kron/json_io.hpp"
#include "kron/rep.hpp"
#include "kron/search.hpp"

namespace {

using nlohmann::json;

struct CliConfig {
    std::string default_field = "q";
    std::uint64_t max_candidates = std::uint64_t{1} << 26;
    std::uint64_t max_class_size = std::uint64_t{1} << 20;
    int workers = 1;
    std::string output_format = "json"; // json | table
    std::string checkpoint_dir;
};

json config_json(const CliConfig& c) {
    return json{{"default_field", c.default_field},
                {"max_candidates", c.max_candidates},
                {"max_class_size", c.max_class_size},
                {"workers", c.workers},
                {"output_format", c.output_format},
                {"checkpoint_dir", c.checkpoint_dir}};
}

kron::FieldSpec parse_field(const std::string& s) {
    if (s == "q" || s == "Q") return kron::FieldSpec::rational();
    if (s.size() >= 2 && (s[0] == 'p' || s[0] == 'P')) {
        try {
            return kron::FieldSpec::prime(std::stoull(s.substr(1)));
        } catch (const std::invalid_argument&) {
            // fall through to the error below
        }
    }
    throw kron::PreconditionError("field must be 'q' or 'p<prime>' (e.g. p2), got '" + s + "'");
}

json read_json_input(const std::string& path) {
    json j;
    if (path == "-") {
        std::cin >> j;
    } else {
        std::ifstream in(path);
        if (!in) throw kron::PreconditionError("cannot open input file " + path);
        in >> j;
    }
    return j;
}

kron::AnyRep read_rep(const std::string& path) {
    json j;
    try {
        j = read_json_input(path);
    } catch (const json::exception& e) {
        throw kron::PreconditionError(path + ": not valid JSON (" + e.what() + ")");
    }
    return kron::rep_from_json(j);
}

/// Rep files keep the bare interchange schema; everything else carries
/// schema_version and the effective config.
void emit_result(const CliConfig& cfg, json j) {
    j["schema_version"] = 1;
    j["config"] = config_json(cfg);
    std::cout << j.dump(2) << "\n";
}

void write_or_print_rep(const CliConfig& cfg, const json& rep_json, const std::string& out_path,
                        json summary) {
    if (out_path.empty()) {
        std::cout << rep_json.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw kron::PreconditionError("cannot write output file " + out_path);
    out << rep_json.dump(2) << "\n";
    summary["written"] = out_path;
    emit_result(cfg, std::move(summary));
}

std::vector<std::uint64_t> parse_prime_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoull(tok));
    }
    if (out.empty()) throw kron::PreconditionError("empty prime list");
    return out;
}

void print_survey_table(const kron::SurveyReport& rep) {
    std::printf("%6s %6s %7s  %s\n", "x", "y", "passes", "violated");
    for (const auto& r : rep.rows) {
        std::string v;
        for (const auto& name : r.violated) {
            if (!v.empty()) v += ", ";
            v += name;
        }
        std::printf("%6lld %6lld %7s  %s\n", static_cast<long long>(r.x),
                    static_cast<long long>(r.y), r.passes ? "yes" : "no", v.c_str());
    }
    std::printf("total %llu, passed %llu\n", static_cast<unsigned long long>(rep.total),
                static_cast<unsigned long long>(rep.passed));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kronrep: exact dimension-vector calculus, module construction, elementarity "
                 "criteria and exhaustive searches for the generalized Kronecker quiver K(n)"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "kronrep.toml", "Configuration file (TOML)");

    CliConfig cfg;
    app.add_option("--default-field", cfg.default_field,
                   "Field used when a command does not specify one ('q' or 'p<prime>')");
    app.add_option("--max-candidates", cfg.max_candidates, "Search-space size cap")
        ->envname("KRONREP_MAX_CANDIDATES");
    app.add_option("--max-class-size", cfg.max_class_size,
                   "Cap on survivors fed to isomorphism classing")
        ->envname("KRONREP_MAX_CLASS_SIZE");
    app.add_option("--workers", cfg.workers, "Worker threads for searches");
    app.add_option("--format", cfg.output_format, "Output format: json or table")
        ->check(CLI::IsMember({"json", "table"}));
    app.add_option("--checkpoint-dir", cfg.checkpoint_dir,
                   "Directory for resumable search checkpoints (empty disables)");

    // ---------------------------------------------------------------- dimvec
    auto* dv = app.add_subcommand("dimvec", "Dimension-vector calculus for K(n)");
    dv->require_subcommand(1);
    int dv_n = 3;
    std::int64_t dv_x = 0, dv_y = 0;
    auto add_dimvec_args = [&](CLI::App* sub) {
        sub->add_option("--n", dv_n, "Arrow count n >= 3")->required();
        sub->add_option("x", dv_x, "First coordinate")->required();
        sub->add_option("y", dv_y, "Second coordinate")->required();
    };

    auto* dv_q = dv->add_subcommand("q", "Quadratic form q(x,y) = x^2 + y^2 - n x y");
    add_dimvec_args(dv_q);
    dv_q->callback([&] {
        kron::QuiverParam q(dv_n);
        emit_result(cfg, json{{"n", dv_n},
                              {"v", {dv_x, dv_y}},
                              {"q", kron::quadratic_form(q, {dv_x, dv_y})}});
    });

    auto* dv_cl = dv->add_subcommand(
        "classify", "Cone class of a nonnegative vector: zero, regular (q < 0), or the "
                    "preprojective/preinjective side of q >= 0");
    add_dimvec_args(dv_cl);
    dv_cl->callback([&] {
        kron::QuiverParam q(dv_n);
        emit_result(cfg, json{{"n", dv_n},
                              {"v", {dv_x, dv_y}},
                              {"class", kron::to_string(kron::classify(q, {dv_x, dv_y}))}});
    });

    auto* dv_red = dv->add_subcommand(
        "reduce", "Reduce a regular vector into the fundamental domain F = {2x/n <= y <= x}; "
                  "the trace lists the generators applied, replayable in both directions");
    add_dimvec_args(dv_red);
    dv_red->callback([&] {
        kron::QuiverParam q(dv_n);
        auto [red, trace] = kron::reduce_to_fundamental_domain(q, {dv_x, dv_y});
        json tr = json::array();
        for (auto g : trace.word) tr.push_back(kron::to_string(g));
        emit_result(cfg, json{{"n", dv_n},
                              {"v", {dv_x, dv_y}},
                              {"reduced", {red.x, red.y}},
                              {"trace", std::move(tr)}});
    });

    auto* dv_f = dv->add_subcommand(
        "filters", "Necessary conditions on an elementary dimension vector in F: x<n (when "
                   "x-y<=n-2), y<2(n-1), x<2n, y^2-y+2x<=4n+2 (when n<x<2n), x+y<=n+1 (when x<n)");
    add_dimvec_args(dv_f);
    dv_f->callback([&] {
        kron::QuiverParam q(dv_n);
        auto rep = kron::elementary_filters(q, {dv_x, dv_y});
        emit_result(cfg, json{{"n", dv_n},
                              {"v", {dv_x, dv_y}},
                              {"passes", rep.passes},
                              {"violated", rep.violated},
                              {"note", kron::FilterReport::note}});
    });

    auto* dv_o = dv->add_subcommand("orbit", "Sample {sigma^t v} over a t-interval, skipping "
                                             "iterates that leave the nonnegative quadrant");
    add_dimvec_args(dv_o);
    int t_min = 0, t_max = 0;
    dv_o->add_option("--t-min", t_min, "Lowest power of sigma")->required();
    dv_o->add_option("--t-max", t_max, "Highest power of sigma")->required();
    dv_o->callback([&] {
        kron::QuiverParam q(dv_n);
        json orbit = json::array();
        for (auto v : kron::orbit_sample(q, {dv_x, dv_y}, t_min, t_max))
            orbit.push_back({v.x, v.y});
        emit_result(cfg, json{{"n", dv_n}, {"v", {dv_x, dv_y}}, {"orbit", std::move(orbit)}});
    });

    // ---------------------------------------------------------------- module
    auto* mod = app.add_subcommand("module", "Construct and analyze K(n) representations");
    mod->require_subcommand(1);

    auto* mk = mod->add_subcommand(
        "make-x", "Build the banded module X(x,y) (arrow k sends e_j to e'_{k-j+1}); its "
                  "generator stacks form a constant-rank-y matrix space");
    int mk_n = 5;
    std::int64_t mk_x = 0, mk_y = 0;
    std::string mk_field, mk_out;
    mk->add_option("--n", mk_n, "Arrow count")->required();
    mk->add_option("--x", mk_x, "dim M1")->required();
    mk->add_option("--y", mk_y, "dim M2")->required();
    mk->add_option("--field", mk_field, "Field: 'q' or 'p<prime>' (default from config)");
    mk->add_option("-o,--out", mk_out, "Write the module file here instead of stdout");
    mk->callback([&] {
        const auto fs = parse_field(mk_field.empty() ? cfg.default_field : mk_field);
        kron::QuiverParam q(mk_n);
        json rep_json = kron::with_field(fs, [&](auto field) {
            return kron::rep_to_json(kron::make_x(q, mk_x, mk_y, field));
        });
        write_or_print_rep(cfg, rep_json, mk_out, json{{"dim", {mk_x, mk_y}}});
    });

    std::string in_a, in_b, out_path;

    auto* val = mod->add_subcommand("validate", "Check the shape invariants of a module file");
    val->add_option("input", in_a, "Module file ('-' for stdin)")->required();
    val->callback([&] {
        kron::AnyRep r = read_rep(in_a);
        std::visit([](const auto& rep) { kron::validate(rep); }, r);
        emit_result(cfg, json{{"ok", true}});
    });

    auto* du = mod->add_subcommand("dual", "Dual module: transposed maps, swapped vertices; "
                                           "dim(M*) = delta(dim M)");
    du->add_option("input", in_a)->required();
    du->add_option("-o,--out", out_path, "Output file");
    du->callback([&] {
        kron::AnyRep r = read_rep(in_a);
        json out = std::visit([](const auto& rep) { return kron::rep_to_json(kron::dual(rep)); }, r);
        write_or_print_rep(cfg, out, out_path, json::object());
    });

    auto* refl = mod->add_subcommand(
        "reflect", "Apply the reflection at the sink or source t times; on modules without a "
                   "killed simple summand the dimension vector follows sigma/sigma_inv");
    std::string refl_dir;
    int refl_t = 1;
    refl->add_option("input", in_a)->required();
    refl->add_option("--dir", refl_dir, "sink or source")
        ->required()
        ->check(CLI::IsMember({"sink", "source"}));
    refl->add_option("--t", refl_t, "Number of reflections (default 1)");
    refl->add_option("-o,--out", out_path, "Output file");
    refl->callback([&] {
        if (refl_t < 0) throw kron::PreconditionError("--t must be >= 0");
        kron::AnyRep r = read_rep(in_a);
        std::visit(
            [&](auto rep) {
                std::size_t killed_total = 0;
                for (int i = 0; i < refl_t; ++i) {
                    auto res = refl_dir == "sink" ? kron::reflect_sink(rep)
                                                  : kron::reflect_source(rep);
                    killed_total += res.killed;
                    rep = std::move(res.rep);
                }
                write_or_print_rep(cfg, kron::rep_to_json(rep), out_path,
                                   json{{"dim", {rep.d1, rep.d2}}, {"killed", killed_total}});
            },
            r);
    });

    auto* mcl = mod->add_subcommand(
        "classify", "Regularity verdict: iterated reflections detect preprojective or "
                    "preinjective direct summands by the simples they kill");
    int mcl_bound = 16;
    mcl->add_option("input", in_a)->required();
    mcl->add_option("--bound", mcl_bound, "Reflection budget (2*bound steps per direction)");
    mcl->callback([&] {
        kron::AnyRep r = read_rep(in_a);
        auto verdict = std::visit(
            [&](const auto& rep) { return kron::regularity_test(rep, mcl_bound); }, r);
        emit_result(cfg, json{{"verdict", kron::to_string(verdict)}});
    });

    auto* chk = mod->add_subcommand(
        "check", "Elementarity criteria: rank_small_x (every nonzero generator stack has rank y; "
                 "valid for (x,y) in F, x<=n-1), two_condition_mid_x (single generators give "
                 "(1,n), pairs give (2,x); for n<x<2n), regular_split (a submodule with regular "
                 "dimension vector and regular quotient rules elementarity out)");
    std::string chk_criterion = "auto";
    chk->add_option("input", in_a)->required();
    chk->add_option("--criterion", chk_criterion, "auto, small-x, mid-x or split")
        ->check(CLI::IsMember({"auto", "small-x", "mid-x", "split"}));
    chk->callback([&] {
        kron::AnyRep r = read_rep(in_a);
        std::visit(
            [&](const auto& rep) {
                using F = typename std::decay_t<decltype(rep)>::Field;
                const kron::DimVec d = rep.dim();
                std::string crit = chk_criterion;
                if (crit == "auto") {
                    const kron::QuiverParam q = rep.quiver;
                    if (d.x >= 1 && d.x <= q.n - 1 && kron::in_fundamental_domain(q, d))
                        crit = "small-x";
                    else if (q.n < d.y && d.y < 2 * q.n &&
                             kron::in_fundamental_domain(q, kron::DimVec{d.y, d.x}))
                        crit = "mid-x";
                    else
                        crit = "split";
                }
                kron::ElementarityReport<F> rep_out;
                if (crit == "small-x")
                    rep_out = kron::check_rank_criterion_small_x(rep);
                else if (crit == "mid-x")
                    rep_out = kron::check_two_condition_mid_x(rep);
                else
                    rep_out = kron::check_regular_split_obstruction(rep);
                emit_result(cfg, kron::report_to_json(rep.field, rep_out));
            },
            r);
    });

    auto* hom = mod->add_subcommand("hom", "Basis of the space of morphisms (f1, f2) with "
                                           "f2 * map_a(i) = map_b(i) * f1 for every arrow");
    hom->add_option("a", in_a)->required();
    hom->add_option("b", in_b)->required();
    hom->callback([&] {
        kron::AnyRep ra = read_rep(in_a), rb = read_rep(in_b);
        if (ra.index() != rb.index())
            throw kron::PreconditionError("hom: modules live over different fields");
        std::visit(
            [&](const auto& a) {
                using Rep = std::decay_t<decltype(a)>;
                const auto& b = std::get<Rep>(rb);
                auto basis = kron::hom_space(a, b);
                json arr = json::array();
                for (const auto& h : basis)
                    arr.push_back(json{{"f1", kron::matrix_to_json(h.f1)},
                                       {"f2", kron::matrix_to_json(h.f2)}});
                emit_result(cfg, json{{"dim", basis.size()}, {"basis", std::move(arr)}});
            },
            ra);
    });

    auto* iso = mod->add_subcommand("iso", "Search the hom space for an invertible intertwiner "
                                           "pair (exhaustive over F_p below the cap)");
    iso->add_option("a", in_a)->required();
    iso->add_option("b", in_b)->required();
    iso->callback([&] {
        kron::AnyRep ra = read_rep(in_a), rb = read_rep(in_b);
        if (ra.index() != rb.index())
            throw kron::PreconditionError("iso: modules live over different fields");
        std::visit(
            [&](const auto& a) {
                using Rep = std::decay_t<decltype(a)>;
                const auto& b = std::get<Rep>(rb);
                auto found = kron::is_isomorphic(a, b);
                json out{{"isomorphic", found.has_value()}};
                if (found) {
                    out["f1"] = kron::matrix_to_json(found->f1);
                    out["f2"] = kron::matrix_to_json(found->f2);
                }
                emit_result(cfg, std::move(out));
            },
            ra);
    });

    // ---------------------------------------------------------------- search
    auto* se = app.add_subcommand("search", "Exhaustive desk-scale experiments over F_p");
    se->require_subcommand(1);

    auto* sc = se->add_subcommand(
        "classify", "Enumerate all representations of a dimension vector over F_p, filter by an "
                    "elementarity criterion, and group survivors into isomorphism classes; flags "
                    "the class of X(x,y) when x+y = n+1");
    int sc_n = 3;
    std::uint64_t sc_p = 2;
    std::int64_t sc_x = 1, sc_y = 1;
    std::string sc_criterion = "small-x", sc_out;
    bool sc_force = false;
    sc->add_option("--n", sc_n)->required();
    sc->add_option("--p", sc_p)->required();
    sc->add_option("--x", sc_x, "dim M1")->required();
    sc->add_option("--y", sc_y, "dim M2")->required();
    sc->add_option("--criterion", sc_criterion)->check(CLI::IsMember({"small-x", "mid-x", "split"}));
    sc->add_option("--out", sc_out, "Write the full result JSON here");
    sc->add_flag("--force-large", sc_force, "Run even above the candidate cap");
    sc->callback([&] {
        kron::SearchSpec spec{kron::QuiverParam(sc_n),
                              sc_p,
                              kron::DimVec{sc_x, sc_y},
                              sc_criterion,
                              kron::SearchCaps{cfg.max_candidates, cfg.max_class_size,
                                               std::uint64_t{1} << 20},
                              cfg.workers,
                              sc_force,
                              ""};
        if (!cfg.checkpoint_dir.empty())
            spec.checkpoint_path = cfg.checkpoint_dir + "/search-n" + std::to_string(sc_n) + "-p" +
                                   std::to_string(sc_p) + "-" + std::to_string(sc_x) + "x" +
                                   std::to_string(sc_y) + "-" + sc_criterion + ".ckpt.json";
        kron::SearchResult res = kron::enumerate_and_filter(spec);
        if (!sc_out.empty()) {
            std::ofstream out(sc_out, std::ios::trunc);
            if (!out) throw kron::PreconditionError("cannot write " + sc_out);
            // the result file is deterministic for a given spec; elapsed time
            // is reported on stdout only
            out << kron::search_result_to_json(res, false).dump(2) << "\n";
        }
        json classes = json::array();
        for (const auto& c : res.classes)
            classes.push_back(json{{"counter", c.representative_counter},
                                   {"size", c.size},
                                   {"matches_X", c.matches_x}});
        emit_result(cfg, json{{"total_enumerated", res.total_enumerated},
                              {"passed_criterion", res.passed_criterion},
                              {"class_count", res.classes.size()},
                              {"classes", std::move(classes)},
                              {"elapsed_seconds", res.elapsed_seconds},
                              {"written", sc_out}});
    });

    auto* sv = se->add_subcommand(
        "survey", "Run every (x,y) in F up to x-max through the necessary-condition filters and "
                  "check the survivor set against its closed form");
    int sv_n = 3;
    std::int64_t sv_xmax = 20;
    std::string sv_out;
    sv->add_option("--n", sv_n)->required();
    sv->add_option("--x-max", sv_xmax)->required();
    sv->add_option("--out", sv_out, "Write the full table JSON here");
    sv->callback([&] {
        auto rep = kron::verify_filters_survey(kron::QuiverParam(sv_n), sv_xmax);
        json j = kron::survey_to_json(rep);
        if (!sv_out.empty()) {
            std::ofstream out(sv_out, std::ios::trunc);
            if (!out) throw kron::PreconditionError("cannot write " + sv_out);
            out << j.dump(2) << "\n";
        }
        if (cfg.output_format == "table") {
            print_survey_table(rep);
        } else {
            emit_result(cfg, std::move(j));
        }
    });

    auto* sw = se->add_subcommand(
        "westwick", "Verify that the generator stacks of X(x,y) at x+y = n+1 realize the "
                    "Westwick bounds: a constant-rank-y space of dimension exactly n+1-y");
    int sw_nmin = 3, sw_nmax = 6;
    std::string sw_p = "2", sw_out;
    sw->add_option("--n-min", sw_nmin)->required();
    sw->add_option("--n-max", sw_nmax)->required();
    sw->add_option("--p", sw_p, "Comma-separated primes, e.g. 2,3,5");
    sw->add_option("--out", sw_out, "Write the full report JSON here");
    sw->callback([&] {
        auto rep = kron::verify_westwick_for_x(sw_nmin, sw_nmax, parse_prime_list(sw_p));
        json j = kron::westwick_to_json(rep);
        if (!sw_out.empty()) {
            std::ofstream out(sw_out, std::ios::trunc);
            if (!out) throw kron::PreconditionError("cannot write " + sw_out);
            out << j.dump(2) << "\n";
        }
        emit_result(cfg, std::move(j));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const kron::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
