#include "skewlab/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skewlab {

json to_json(const PointSet2& A) {
    json pts = json::array();
    for (const auto& p : A.points()) pts.push_back({p.x, p.y});
    return json{{"domain",
                 {{"kind", A.domain().kind_name()},
                  {"size", A.domain().size}}},
                {"points", pts}};
}

PointSet2 point_set_from_json(const json& j) {
    const auto& dj = j.at("domain");
    const std::string kind = dj.at("kind").get<std::string>();
    const std::int64_t size = dj.at("size").get<std::int64_t>();
    Domain dom = kind == "grid" ? Domain::grid(size)
               : kind == "cyclic" ? Domain::cyclic(size)
               : throw std::invalid_argument("unknown domain kind: " + kind);
    std::vector<Point2> pts;
    for (const auto& pj : j.at("points"))
        pts.push_back({pj.at(0).get<std::int64_t>(), pj.at(1).get<std::int64_t>()});
    return PointSet2(dom, std::move(pts));
}

json to_json(const IntSet1& B) {
    return json{{"n", B.n}, {"elements", B.elements}};
}

IntSet1 int_set_from_json(const json& j) {
    IntSet1 out;
    out.n = j.at("n").get<std::int64_t>();
    for (const auto& e : j.at("elements")) {
        const std::int64_t v = e.get<std::int64_t>();
        if (v < 1 || v > out.n)
            throw std::invalid_argument("element outside [1, n]");
        out.elements.insert(v);
    }
    return out;
}

json bohr_descriptor(const BohrSet& B) {
    return json{{"N", B.modulus()}, {"freqs", B.freq().freqs}, {"radius", B.radius()}};
}

BohrSet bohr_from_json(const json& j) {
    return build_bohr(j.at("N").get<std::int64_t>(),
                      j.at("freqs").get<std::vector<std::int64_t>>(),
                      j.at("radius").get<double>());
}

json to_json(const SkewCornerWitness& w) {
    return json{{"x", w.x}, {"y", w.y}, {"yprime", w.yprime}, {"a", w.a}};
}

json to_json(const SixPointWitness& w) {
    return json{{"x", w.x}, {"y", w.y}, {"a", w.a}};
}

json to_json(const NormValue& v) {
    json j{{"value", v.value},
           {"raw", v.raw},
           {"method", v.method == NormMethod::exact ? "exact" : "monte_carlo"}};
    if (v.method == NormMethod::monte_carlo) {
        j["stderr"] = v.stderr_;
        j["samples"] = v.samples;
        j["seed"] = v.seed;
    }
    return j;
}

json to_json(const InequalityVerdict& v) {
    return json{{"lhs", v.lhs},
                {"rhs", v.rhs},
                {"holds", v.holds},
                {"slack", v.slack},
                {"instance", v.instance_digest}};
}

json to_json(const RegularityReport& r) {
    return json{{"regular", r.regular},
                {"worst_delta", r.worst_delta},
                {"worst_ratio", r.worst_ratio},
                {"breakpoints_checked", r.breakpoints_checked},
                {"reason", r.reason}};
}

json to_json(const StructureReport& r) {
    json j{{"sumset_ok", r.sumset_ok},
           {"doubling_ok", r.doubling_ok},
           {"b2_size", r.b2_size},
           {"doubling_bound", r.doubling_bound}};
    if (r.counterexample) j["counterexample"] = *r.counterexample;
    return j;
}

json to_json(const ExtremalResult& r) {
    return json{{"n", r.n},
                {"value", r.value},
                {"optimal", r.optimal},
                {"nodes_explored", r.nodes_explored},
                {"witness", to_json(r.witness)}};
}

json to_json(const Verdict& v) {
    return json{{"name", v.name},
                {"lhs", v.lhs},
                {"rhs", v.rhs},
                {"holds", v.holds},
                {"hard", v.hard}};
}

json to_json(const StepReport& r) {
    json vs = json::array();
    for (const auto& v : r.verdicts) vs.push_back(to_json(v));
    return json{{"step", r.step},
                {"measured", r.measured},
                {"witnesses", r.witnesses},
                {"verdicts", vs}};
}

json to_json(const IncrementOutcome& o) {
    json reps = json::array();
    for (const auto& r : o.reports) reps.push_back(to_json(r));
    json j{{"kind", outcome_kind_name(o.kind)}, {"detail", o.detail}, {"reports", reps}};
    if (o.Bprime) {
        j["Bprime"] = bohr_descriptor(*o.Bprime);
        j["x_translate"] = o.x_translate;
        j["y_translate"] = o.y_translate;
        j["base_alpha"] = o.base_alpha;
        j["final_density"] = o.final_density;
        j["x_section_size"] = o.x_section_size;
    }
    if (o.kind == OutcomeKind::Step1ColumnIncrement) j["column_set"] = o.column_set;
    if (o.corner) j["corner"] = to_json(*o.corner);
    return j;
}

json to_json(const IterationLog& l) {
    json entries = json::array();
    for (const auto& e : l.entries) {
        json bc = json::array();
        for (const auto& v : e.bullet_checks) bc.push_back(to_json(v));
        entries.push_back(json{{"i", e.i},
                               {"delta", e.delta},
                               {"rank", e.rank},
                               {"radius", e.radius},
                               {"alpha", e.alpha},
                               {"outcome", outcome_kind_name(e.outcome)},
                               {"bullet_checks", bc}});
    }
    json outs = json::array();
    for (const auto& o : l.outcomes) outs.push_back(to_json(o));
    return json{{"entries", entries}, {"outcomes", outs}};
}

json to_json(const IncrementConstants& c) {
    json j{{"c1", c.c1},
           {"c2", c.c2},
           {"c3", c.c3},
           {"C", c.C},
           {"assume_corner_free", c.assume_corner_free},
           {"random_subset_y", c.random_subset_y},
           {"seed", c.seed},
           {"ap_max_rank", c.ap_max_rank},
           {"overridden", c.overridden()}};
    if (c.r) j["r"] = *c.r;
    if (c.r_prime) j["r_prime"] = *c.r_prime;
    if (c.kappa) j["kappa"] = *c.kappa;
    if (c.lambda) j["lambda"] = *c.lambda;
    if (c.mu) j["mu"] = *c.mu;
    if (c.nu) j["nu"] = *c.nu;
    if (c.mu0) j["mu0"] = *c.mu0;
    if (!c.ap_radius_grid.empty()) j["ap_radius_grid"] = c.ap_radius_grid;
    return j;
}

IncrementConstants constants_from_json(const json& j) {
    IncrementConstants c;
    if (j.contains("c1")) c.c1 = j["c1"].get<double>();
    if (j.contains("c2")) c.c2 = j["c2"].get<double>();
    if (j.contains("c3")) c.c3 = j["c3"].get<double>();
    if (j.contains("C")) c.C = j["C"].get<double>();
    if (j.contains("r")) c.r = j["r"].get<std::int64_t>();
    if (j.contains("r_prime")) c.r_prime = j["r_prime"].get<std::int64_t>();
    if (j.contains("kappa")) c.kappa = j["kappa"].get<double>();
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("mu")) c.mu = j["mu"].get<double>();
    if (j.contains("nu")) c.nu = j["nu"].get<double>();
    if (j.contains("mu0")) c.mu0 = j["mu0"].get<double>();
    if (j.contains("assume_corner_free"))
        c.assume_corner_free = j["assume_corner_free"].get<bool>();
    if (j.contains("random_subset_y"))
        c.random_subset_y = j["random_subset_y"].get<bool>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("ap_max_rank")) c.ap_max_rank = j["ap_max_rank"].get<int>();
    if (j.contains("ap_radius_grid"))
        c.ap_radius_grid = j["ap_radius_grid"].get<std::vector<double>>();
    return c;
}

json to_json(const FunctionTable2& t) {
    json rows = json::array();
    for (std::size_t i = 0; i < t.nrows(); ++i) {
        json row = json::array();
        for (std::size_t j2 = 0; j2 < t.ncols(); ++j2) row.push_back(t.at(i, j2));
        rows.push_back(row);
    }
    return json{{"rows", t.rows()}, {"cols", t.cols()}, {"values", rows}};
}

FunctionTable2 table_from_json(const json& j) {
    auto I = j.at("rows").get<std::vector<std::int64_t>>();
    auto J = j.at("cols").get<std::vector<std::int64_t>>();
    std::vector<double> vals;
    vals.reserve(I.size() * J.size());
    for (const auto& row : j.at("values"))
        for (const auto& v : row) vals.push_back(v.get<double>());
    return FunctionTable2(std::move(I), std::move(J), std::move(vals));
}

std::string table_to_csv(const FunctionTable2& t) {
    std::ostringstream out;
    out.precision(17);
    out << "x";
    for (std::int64_t cj : t.cols()) out << "," << cj;
    out << "\n";
    for (std::size_t i = 0; i < t.nrows(); ++i) {
        out << t.rows()[i];
        for (std::size_t j = 0; j < t.ncols(); ++j) out << "," << t.at(i, j);
        out << "\n";
    }
    return out.str();
}

FunctionTable2 table_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    auto header = split(line);
    if (header.empty() || header[0] != "x")
        throw std::invalid_argument("CSV header must start with 'x'");
    std::vector<std::int64_t> J;
    for (std::size_t i = 1; i < header.size(); ++i) J.push_back(std::stoll(header[i]));
    std::vector<std::int64_t> I;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != J.size() + 1)
            throw std::invalid_argument("CSV row width mismatch");
        I.push_back(std::stoll(cells[0]));
        for (std::size_t i = 1; i < cells.size(); ++i) vals.push_back(std::stod(cells[i]));
    }
    return FunctionTable2(std::move(I), std::move(J), std::move(vals));
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace skewlab
