// skewlab command-line interface: one binary, eleven subcommands, JSON in,
// JSON/CSV out, a manifest per run. Exit codes: 0 success, 1 usage error,
// 2 hard-inequality failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewlab/detect.hpp"
#include "skewlab/extremal.hpp"
#include "skewlab/inequalities.hpp"
#include "skewlab/json_io.hpp"
#include "skewlab/norms.hpp"
#include "skewlab/tracer.hpp"

namespace {

using skewlab::json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HardFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Accumulates everything a run needs to report and writes it out once.
struct Run {
    std::string subcommand;
    json parameters = json::object();
    json digests = json::object();
    std::uint64_t seed = 0;
    std::string out_dir;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    json load_input(const std::string& path) {
        const std::string bytes = slurp(path);
        digests[path] = fnv1a_hex(bytes);
        try {
            return json::parse(bytes);
        } catch (const json::parse_error& e) {
            throw UsageError("malformed JSON in " + path + ": " + e.what());
        }
    }

    std::string load_text(const std::string& path) {
        const std::string bytes = slurp(path);
        digests[path] = fnv1a_hex(bytes);
        return bytes;
    }

    json manifest() const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        return json{{"subcommand", subcommand}, {"parameters", parameters},
                    {"seed", seed},             {"input_digests", digests},
                    {"tool_version", kVersion}, {"wall_time_seconds", wall}};
    }

    void emit(const std::string& summary, json result,
              const std::optional<std::pair<std::string, std::string>>& csv = {}) {
        std::cout << summary << "\n";
        if (out_dir.empty()) {
            result["manifest"] = manifest();
            std::cout << result.dump(2) << "\n";
            return;
        }
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw UsageError("cannot create output directory " + out_dir);
        skewlab::save_json_file(out_dir + "/result.json", result);
        skewlab::save_json_file(out_dir + "/manifest.json", manifest());
        if (csv) {
            std::ofstream c(out_dir + "/" + csv->first);
            if (!c) throw UsageError("cannot write " + out_dir + "/" + csv->first);
            c << csv->second;
        }
    }
};

std::vector<double> values_1d(const json& j) {
    const json& arr = j.is_array() ? j : j.at("values");
    std::vector<double> out;
    for (const auto& v : arr) out.push_back(v.get<double>());
    return out;
}

skewlab::FunctionTable2 load_table(Run& run, const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return skewlab::table_from_csv(run.load_text(path));
    return skewlab::table_from_json(run.load_input(path));
}

std::vector<std::int64_t> residues_of(const json& j) {
    return j.get<std::vector<std::int64_t>>();
}

std::vector<std::int64_t> all_residues(std::int64_t N) {
    std::vector<std::int64_t> out(N);
    for (std::int64_t i = 0; i < N; ++i) out[i] = i;
    return out;
}

// Small-denominator rational reconstruction for --eps given as a double.
std::pair<std::int64_t, std::int64_t> to_rational(double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw UsageError("--eps must be in (0, 1]");
    for (std::int64_t den = 1; den <= (1 << 20); den *= 2) {
        const double num = eps * double(den);
        if (num == std::floor(num)) return {std::int64_t(num), den};
    }
    throw UsageError("--eps must be a dyadic rational");
}

json verdict_payload(const skewlab::InequalityVerdict& v) { return to_json(v); }

void require_holds(const skewlab::InequalityVerdict& v, const std::string& name) {
    if (!v.holds)
        throw HardFailure(name + " violated: lhs=" + std::to_string(v.lhs) +
                          " rhs=" + std::to_string(v.rhs));
}

int dispatch(int argc, char** argv) {
    CLI::App app{"skewlab: skew-corner structure toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Run run;
    std::string in_path, bohr_path, constants_path;
    std::string b_path, bprime_path, x_path;
    run.seed = 0;
    std::uint64_t samples = 10000;
    int threads = 1;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", run.out_dir, "output directory");
        sub->add_option("--seed", run.seed, "RNG seed");
        sub->add_option("--threads", threads, "worker cap (default 1)");
    };

    // detect / count / lift / sixcheck -------------------------------------
    auto* detect = app.add_subcommand("detect", "find a skew corner in a point set");
    detect->add_option("--in", in_path, "PointSet2 JSON")->required();
    add_common(detect);
    detect->callback([&] {
        run.subcommand = "detect";
        run.parameters["in"] = in_path;
        const auto A = skewlab::point_set_from_json(run.load_input(in_path));
        const auto w = skewlab::find_skew_corner(A);
        json res{{"found", bool(w)}};
        std::string summary = "no skew corner";
        if (w) {
            res["witness"] = to_json(*w);
            summary = "skew corner at x=" + std::to_string(w->x) +
                      " y=" + std::to_string(w->y) + " y'=" + std::to_string(w->yprime) +
                      " a=" + std::to_string(w->a);
        }
        run.emit(summary, res);
    });

    auto* count = app.add_subcommand("count", "count skew corners in a point set");
    count->add_option("--in", in_path, "PointSet2 JSON")->required();
    add_common(count);
    count->callback([&] {
        run.subcommand = "count";
        run.parameters["in"] = in_path;
        const auto A = skewlab::point_set_from_json(run.load_input(in_path));
        const auto c = skewlab::count_skew_corners(A);
        run.emit("skew corners: " + std::to_string(c), json{{"count", c}});
    });

    auto* lift = app.add_subcommand("lift", "lift a 1-D set to a skew instance");
    lift->add_option("--in", in_path, "IntSet1 JSON")->required();
    add_common(lift);
    lift->callback([&] {
        run.subcommand = "lift";
        run.parameters["in"] = in_path;
        const auto B = skewlab::int_set_from_json(run.load_input(in_path));
        const auto A = skewlab::lift_to_skew_instance(B);
        run.emit("lifted instance with " + std::to_string(A.size()) + " points",
                 json{{"instance", to_json(A)}});
    });

    auto* sixcheck = app.add_subcommand("sixcheck", "find a six-point configuration");
    sixcheck->add_option("--in", in_path, "IntSet1 JSON")->required();
    add_common(sixcheck);
    sixcheck->callback([&] {
        run.subcommand = "sixcheck";
        run.parameters["in"] = in_path;
        const auto B = skewlab::int_set_from_json(run.load_input(in_path));
        const auto w = skewlab::find_six_point_config(B);
        json res{{"found", bool(w)}};
        std::string summary = "no six-point configuration";
        if (w) {
            res["witness"] = to_json(*w);
            summary = "six-point configuration at x=" + std::to_string(w->x) +
                      " y=" + std::to_string(w->y) + " a=" + std::to_string(w->a);
        }
        run.emit(summary, res);
    });

    // bohr ------------------------------------------------------------------
    auto* bohr = app.add_subcommand("bohr", "build and analyze a Bohr set");
    std::int64_t N = 0;
    std::vector<std::int64_t> freqs;
    double rho = 1.0, delta = 0.5, delta2 = 0.5;
    std::string action = "build";
    bohr->add_option("--N", N, "modulus")->required();
    bohr->add_option("--freqs", freqs, "frequency residues");
    bohr->add_option("--rho", rho, "radius")->required();
    bohr->add_option("--action", action, "build|certify|regular-dilate|structure")
        ->check(CLI::IsMember({"build", "certify", "regular-dilate", "structure"}));
    bohr->add_option("--delta", delta, "structure: first dilate fraction");
    bohr->add_option("--delta2", delta2, "structure: second dilate fraction");
    add_common(bohr);
    bohr->callback([&] {
        run.subcommand = "bohr";
        run.parameters = {{"N", N},     {"freqs", freqs},   {"rho", rho},
                          {"action", action}, {"delta", delta}, {"delta2", delta2}};
        const auto B = skewlab::build_bohr(N, freqs, rho);
        json res{{"bohr", skewlab::bohr_descriptor(B)},
                 {"size", B.size()},
                 {"elements", B.elements()}};
        std::string summary = "|B| = " + std::to_string(B.size());
        if (action == "certify") {
            const auto rep = skewlab::certify_regular(B);
            res["regularity"] = to_json(rep);
            summary += rep.regular ? ", regular" : ", not regular";
        } else if (action == "regular-dilate") {
            const double d = skewlab::find_regular_dilate(B);
            res["regular_dilate"] = d;
            summary += ", regular dilate at " + std::to_string(d);
        } else if (action == "structure") {
            const auto rep = skewlab::check_structure(B, delta, delta2);
            res["structure"] = to_json(rep);
            summary += rep.sumset_ok && rep.doubling_ok ? ", structure ok"
                                                        : ", structure FAILED";
            if (!rep.sumset_ok || !rep.doubling_ok)
                throw HardFailure("Bohr structure check failed");
        }
        std::ostringstream csv;
        csv << "x,t\n";
        for (std::int64_t x : B.elements()) csv << x << "," << B.critical_value(x) << "\n";
        run.emit(summary, res, {{"elements.csv", csv.str()}});
    });

    // norm --------------------------------------------------------------------
    auto* norm = app.add_subcommand("norm", "evaluate a uniformity norm");
    std::string kind;
    int r = 2, kk = 2, ll = 2;
    bool mc = false;
    norm->add_option("--kind", kind, "u2|km|grid|vs|directional")
        ->required()
        ->check(CLI::IsMember({"u2", "km", "grid", "vs", "directional"}));
    norm->add_option("--in", in_path, "table JSON/CSV (2-D) or value array (1-D)")
        ->required();
    norm->add_option("--r", r, "KM/VS order");
    norm->add_option("--k", kk, "grid norm row order");
    norm->add_option("--l", ll, "grid norm column order");
    norm->add_option("--B", b_path, "index set JSON (VS)");
    norm->add_option("--Bprime", bprime_path, "index set JSON (VS)");
    norm->add_flag("--mc", mc, "Monte Carlo estimate");
    norm->add_option("--samples", samples, "Monte Carlo samples");
    add_common(norm);
    norm->callback([&] {
        run.subcommand = "norm";
        run.parameters = {{"kind", kind}, {"in", in_path}, {"r", r},
                          {"k", kk},      {"l", ll},       {"mc", mc},
                          {"samples", samples}};
        skewlab::NormValue v;
        if (kind == "u2" || kind == "km") {
            const auto f = values_1d(run.load_input(in_path));
            v = kind == "u2" ? skewlab::u2_norm(f)
                : mc         ? skewlab::mc_km_power(f, r, samples, run.seed)
                             : skewlab::km_norm(f, r);
        } else if (kind == "grid") {
            const auto f = load_table(run, in_path);
            v = mc ? skewlab::mc_grid_power(f, kk, ll, samples, run.seed)
                   : skewlab::grid_norm(f, kk, ll);
        } else if (kind == "vs") {
            const auto f = load_table(run, in_path);
            const std::int64_t NN = f.torus_modulus();
            const auto B = b_path.empty() ? all_residues(NN)
                                          : residues_of(run.load_input(b_path));
            const auto Bp = bprime_path.empty()
                                ? all_residues(NN)
                                : residues_of(run.load_input(bprime_path));
            v = skewlab::vs_norm(f, r, B, Bp);
        } else {  // directional, over the full derivative groups
            const auto f = load_table(run, in_path);
            const std::int64_t NN = f.torus_modulus();
            v = skewlab::directional_norm_raw(f, skewlab::full_group2(NN),
                                              skewlab::full_group2(NN));
        }
        run.emit(kind + " norm = " + std::to_string(v.value),
                 json{{"norm", to_json(v)}});
    });

    // verify ----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "check one of the library inequalities");
    std::string family;
    double eps = 0.5;
    int rprime = 8, max_rank = 1;
    std::vector<double> radius_grid;
    bool do_search = false;
    verify->add_option("--family", family, "gh1|gh2|gcs|binomial|u2|skew|ap")
        ->required()
        ->check(CLI::IsMember({"gh1", "gh2", "gcs", "binomial", "u2", "skew", "ap"}));
    verify->add_option("--in", in_path, "instance JSON");
    verify->add_option("--r", r, "binomial r");
    verify->add_option("--eps", eps, "binomial epsilon (dyadic)");
    verify->add_option("--rprime", rprime, "binomial r'");
    verify->add_flag("--search", do_search, "ap: search for B' instead of checking");
    verify->add_option("--max-rank", max_rank, "ap search max rank");
    verify->add_option("--radius-grid", radius_grid, "ap search radii");
    add_common(verify);
    verify->callback([&] {
        run.subcommand = "verify";
        run.parameters = {{"family", family}};
        json res;
        std::string summary;
        auto tables_of = [](Run& rn, const json& arr) {
            std::vector<skewlab::FunctionTable2> out;
            for (const auto& t : arr) out.push_back(skewlab::table_from_json(t));
            return out;
        };
        auto ptrs_of = [](const std::vector<skewlab::FunctionTable2>& ts) {
            std::vector<const skewlab::FunctionTable2*> out;
            for (const auto& t : ts) out.push_back(&t);
            return out;
        };
        if (family == "binomial") {
            run.parameters.update(json{{"r", r}, {"eps", eps}, {"rprime", rprime}});
            const auto [num, den] = to_rational(eps);
            const auto v = skewlab::binomial_sum_check(r, rprime, num, den);
            res["verdict"] = verdict_payload(v);
            summary = v.holds ? "binomial lemma holds" : "binomial lemma VIOLATED";
            require_holds(v, "binomial lemma");
        } else if (family == "u2") {
            if (in_path.empty()) throw UsageError("--in required for family u2");
            run.parameters["in"] = in_path;
            const json inst = run.load_input(in_path);
            const auto v = skewlab::check_u2_control(values_1d(inst.at("f1")),
                                                     values_1d(inst.at("f2")),
                                                     values_1d(inst.at("f3")));
            res["verdict"] = verdict_payload(v);
            summary = v.holds ? "U^2 control holds" : "U^2 control VIOLATED";
            require_holds(v, "U^2 control");
        } else if (family == "gh1" || family == "gh2") {
            if (in_path.empty()) throw UsageError("--in required for family " + family);
            run.parameters["in"] = in_path;
            const json inst = run.load_input(in_path);
            const auto fs = tables_of(run, inst.at("fs"));
            const auto gs = tables_of(run, inst.at("gs"));
            const auto B = residues_of(inst.at("B"));
            const auto Bp = residues_of(inst.at("Bprime"));
            const auto v = family == "gh1"
                               ? skewlab::check_gowers_holder_i(ptrs_of(fs), ptrs_of(gs), B, Bp)
                               : skewlab::check_gowers_holder_ii(ptrs_of(fs), ptrs_of(gs), B, Bp);
            res["verdict"] = verdict_payload(v);
            summary = v.holds ? "Gowers-Holder holds" : "Gowers-Holder VIOLATED";
            require_holds(v, "Gowers-Holder");
        } else if (family == "gcs") {
            if (in_path.empty()) throw UsageError("--in required for family gcs");
            run.parameters["in"] = in_path;
            const json inst = run.load_input(in_path);
            std::vector<std::vector<skewlab::FunctionTable2>> rows;
            for (const auto& rowj : inst.at("f_matrix")) rows.push_back(tables_of(run, rowj));
            std::vector<std::vector<const skewlab::FunctionTable2*>> mat;
            for (const auto& rw : rows) mat.push_back(ptrs_of(rw));
            const auto v = skewlab::check_grid_gcs(mat);
            res["verdict"] = verdict_payload(v);
            summary = v.holds ? "grid GCS holds" : "grid GCS VIOLATED";
            require_holds(v, "grid GCS");
        } else if (family == "skew") {
            if (in_path.empty()) throw UsageError("--in required for family skew");
            run.parameters["in"] = in_path;
            const json inst = run.load_input(in_path);
            const auto rep = skewlab::check_skew_control(
                skewlab::table_from_json(inst.at("f1")),
                skewlab::table_from_json(inst.at("f2")),
                skewlab::table_from_json(inst.at("f3")));
            res["lambda"] = rep.lambda;
            res["via_f1_u2"] = verdict_payload(rep.via_f1_u2);
            res["via_f2_u2"] = verdict_payload(rep.via_f2_u2);
            res["via_f1_f2"] = verdict_payload(rep.via_f1_f2);
            summary = "skew control (soft): lambda = " + std::to_string(rep.lambda);
        } else {  // ap
            if (in_path.empty()) throw UsageError("--in required for family ap");
            run.parameters.update(json{{"in", in_path}, {"search", do_search}});
            const json instj = run.load_input(in_path);
            skewlab::ApInstance inst{skewlab::bohr_from_json(instj.at("B1")),
                                     skewlab::bohr_from_json(instj.at("B2")),
                                     residues_of(instj.at("Y")),
                                     residues_of(instj.at("Z")),
                                     residues_of(instj.at("D")),
                                     instj.at("eps").get<double>()};
            if (do_search) {
                if (radius_grid.empty())
                    radius_grid = {inst.B2.radius(), 0.5 * inst.B2.radius(),
                                   0.25 * inst.B2.radius()};
                const auto found = skewlab::ap_search(inst, max_rank, radius_grid);
                res["found"] = bool(found);
                if (found) {
                    res["Bprime"] = skewlab::bohr_descriptor(*found);
                    res["verdict"] =
                        verdict_payload(skewlab::ap_conclusion_check(inst, *found));
                }
                summary = found ? "almost-periodic B' found" : "no B' found";
            } else {
                const auto Bp = skewlab::bohr_from_json(instj.at("Bprime"));
                const auto v = skewlab::ap_conclusion_check(inst, Bp);
                res["verdict"] = verdict_payload(v);
                summary = v.holds ? "AP conclusion holds" : "AP conclusion VIOLATED";
                require_holds(v, "AP conclusion");
            }
        }
        run.emit(summary, res);
    });

    // extremal / construct ----------------------------------------------------
    auto* extremal = app.add_subcommand("extremal", "compute s(n) exactly");
    int n_arg = 3;
    std::string mode = "bnb";
    double budget = 60.0;
    bool no_sym = false;
    extremal->add_option("--n", n_arg, "grid side")->required();
    extremal->add_option("--mode", mode, "brute|bnb")
        ->check(CLI::IsMember({"brute", "bnb"}));
    extremal->add_option("--time-budget", budget, "seconds (bnb)");
    extremal->add_flag("--no-symmetry", no_sym, "disable symmetry breaking");
    std::string incumbent_path;
    extremal->add_option("--incumbent", incumbent_path, "starting witness JSON");
    add_common(extremal);
    extremal->callback([&] {
        run.subcommand = "extremal";
        run.parameters = {{"n", n_arg}, {"mode", mode}, {"time_budget", budget}};
        skewlab::ExtremalResult er;
        if (mode == "brute") {
            er = skewlab::brute_force_s(n_arg);
        } else {
            skewlab::SearchConfig cfg;
            cfg.time_budget_seconds = budget;
            cfg.symmetry_breaking = !no_sym;
            if (!incumbent_path.empty()) {
                run.parameters["incumbent"] = incumbent_path;
                cfg.incumbent =
                    skewlab::point_set_from_json(run.load_input(incumbent_path));
            }
            er = skewlab::branch_and_bound_s(n_arg, cfg);
        }
        std::ostringstream csv;
        csv << "n,s,witness_size\n"
            << er.n << "," << er.value << "," << er.witness.size() << "\n";
        run.emit("s(" + std::to_string(n_arg) + ") " +
                     (er.optimal ? "=" : ">=") + " " + std::to_string(er.value),
                 json{{"result", to_json(er)}}, {{"extremal.csv", csv.str()}});
    });

    auto* construct = app.add_subcommand("construct", "baseline constructions");
    std::string ckind;
    construct->add_option("--kind", ckind, "one-per-column|single-column|behrend")
        ->required()
        ->check(CLI::IsMember({"one-per-column", "single-column", "behrend"}));
    construct->add_option("--n", n_arg, "size parameter")->required();
    add_common(construct);
    construct->callback([&] {
        run.subcommand = "construct";
        run.parameters = {{"kind", ckind}, {"n", n_arg}};
        if (ckind == "behrend") {
            const auto B = skewlab::construct_behrend(n_arg);
            skewlab::IntSet1 s;
            s.n = n_arg;
            s.elements.insert(B.begin(), B.end());
            run.emit("Behrend set of size " + std::to_string(B.size()),
                     json{{"set", to_json(s)}});
        } else {
            const auto A = ckind == "one-per-column"
                               ? skewlab::construct_one_per_column(n_arg)
                               : skewlab::construct_single_column(n_arg);
            run.emit(ckind + " witness of size " + std::to_string(A.size()),
                     json{{"set", to_json(A)}});
        }
    });

    // trace-increment / iterate ------------------------------------------------
    auto* trace = app.add_subcommand("trace-increment", "run one density increment");
    trace->add_option("--in", in_path, "PointSet2 JSON (cyclic)")->required();
    trace->add_option("--X", x_path, "X residues JSON (default: column support)");
    trace->add_option("--bohr", bohr_path, "Bohr descriptor JSON")->required();
    trace->add_option("--constants", constants_path, "IncrementConstants JSON");
    add_common(trace);
    trace->callback([&] {
        run.subcommand = "trace-increment";
        run.parameters = {{"in", in_path}, {"bohr", bohr_path}};
        skewlab::TraceInput ti{
            skewlab::point_set_from_json(run.load_input(in_path)),
            {},
            skewlab::bohr_from_json(run.load_input(bohr_path))};
        if (!x_path.empty()) {
            run.parameters["X"] = x_path;
            ti.X = residues_of(run.load_input(x_path));
        } else {
            std::set<std::int64_t> xs;
            for (const auto& p : ti.A.points()) xs.insert(p.x);
            ti.X.assign(xs.begin(), xs.end());
        }
        skewlab::IncrementConstants consts;
        if (!constants_path.empty()) {
            run.parameters["constants"] = constants_path;
            consts = skewlab::constants_from_json(run.load_input(constants_path));
        }
        const auto out = skewlab::run_increment(ti, consts);
        bool hard_ok = true;
        for (const auto& rep : out.reports)
            if (!rep.all_hard_hold()) hard_ok = false;
        run.emit("outcome: " + skewlab::outcome_kind_name(out.kind) +
                     (out.detail.empty() ? "" : " (" + out.detail + ")"),
                 json{{"outcome", to_json(out)}});
        if (!hard_ok) throw HardFailure("a hard tracer inequality failed");
    });

    auto* iterate = app.add_subcommand("iterate", "iterate the density increment");
    int max_steps = 8;
    iterate->add_option("--in", in_path, "PointSet2 JSON (grid)")->required();
    iterate->add_option("--constants", constants_path, "IncrementConstants JSON");
    iterate->add_option("--max-steps", max_steps, "iteration cap");
    add_common(iterate);
    iterate->callback([&] {
        run.subcommand = "iterate";
        run.parameters = {{"in", in_path}, {"max_steps", max_steps}};
        const auto A = skewlab::point_set_from_json(run.load_input(in_path));
        skewlab::IncrementConstants consts;
        if (!constants_path.empty()) {
            run.parameters["constants"] = constants_path;
            consts = skewlab::constants_from_json(run.load_input(constants_path));
        }
        const auto log = skewlab::iterate_theorem(A, consts, max_steps);
        const std::string last =
            log.entries.empty() ? "none"
                                : skewlab::outcome_kind_name(log.entries.back().outcome);
        std::ostringstream csv;
        csv << "i,delta,d,rho,alpha,outcome\n";
        for (const auto& e : log.entries)
            csv << e.i << "," << e.delta << "," << e.rank << "," << e.radius << ","
                << e.alpha << "," << skewlab::outcome_kind_name(e.outcome) << "\n";
        run.emit("iterations: " + std::to_string(log.entries.size()) +
                     ", last outcome: " + last,
                 json{{"log", to_json(log)}}, {{"iterations.csv", csv.str()}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const HardFailure& e) {
        std::cerr << "hard failure: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::ParseError&) {
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
