#include "curvlab/io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "curvlab/errors.hpp"

namespace curvlab::io {

using geometry::RadialGraph;
using geometry::Warp;
using solver::GraphMode;

namespace {

template <class F>
auto config_guard(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(what + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing field '" + key + "'");
    return *it;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void csv_number(std::ostream& out, double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    out << s.str();
}

void csv_vector(std::ostream& out, const std::vector<double>& v) {
    out << '"';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        csv_number(out, v[i]);
    }
    out << '"';
}

}  // namespace

json envelope(const std::string& kind) { return {{"schema_version", kSchemaVersion}, {"kind", kind}}; }

json to_json(const campaign::Violation& v) {
    return {{"kappa", v.kappa}, {"xi", v.xi}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"gap", v.gap}};
}

json to_json(const campaign::ConcavityReport& r) {
    json j = envelope("campaign_report");
    j["campaign"] = r.campaign;
    j["params"] = r.params;
    j["seed"] = r.seed;
    j["budget"] = r.budget;
    j["samples_tested"] = r.samples_tested;
    j["violation_count"] = r.violation_count;
    j["passed"] = r.passed();
    j["violations"] = json::array();
    for (const auto& v : r.violations) j["violations"].push_back(to_json(v));
    j["tightest"] = json::array();
    for (const auto& v : r.tightest) j["tightest"].push_back(to_json(v));
    j["found_constant"] = optional_number(r.found_constant);
    j["constant_name"] = r.constant_name;
    return j;
}

json to_json(const solver::PsiSpec& psi) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, solver::PsiConstant>) {
                return {{"kind", "constant"}, {"value", s.value}};
            } else if constexpr (std::is_same_v<T, solver::PsiSphereExact>) {
                return {{"kind", "sphere_exact"}, {"R", s.R}};
            } else if constexpr (std::is_same_v<T, solver::PsiHarmonic>) {
                return {{"kind", "harmonic"},         {"base", s.base},
                        {"amplitude", s.amplitude},   {"mode", s.mode},
                        {"radial_power", s.radial_power}, {"lon_amplitude", s.lon_amplitude}};
            } else if constexpr (std::is_same_v<T, solver::PsiTable>) {
                return {{"kind", "table"}, {"values", s.values}};
            } else {
                return {{"kind", "blend"}, {"from", to_json(*s.from)}, {"to", to_json(*s.to)}, {"t", s.t}};
            }
        },
        psi.kind);
}

json to_json(const solver::Problem& p) {
    json grid = {{"mode", geometry::to_string(p.grid.mode)}};
    if (p.grid.mode == GraphMode::axisym) {
        grid["m_theta"] = p.grid.m_theta;
    } else {
        grid["m_lat"] = p.grid.m_lat;
        grid["m_lon"] = p.grid.m_lon;
    }
    return {{"n", p.n}, {"k", p.k}, {"p", p.p}, {"psi", to_json(p.psi)}, {"warp", p.warp.to_json()}, {"grid", grid}};
}

json to_json(const solver::SolveReport& r) {
    json j = envelope("solve_report");
    j["problem"] = to_json(r.problem);
    j["converged"] = r.converged;
    j["status"] = solver::to_string(r.status);
    j["iterations"] = r.iterations;
    j["tolerance"] = r.tolerance;
    j["residual_history"] = r.residual_history;
    j["kappa_max_history"] = r.kappa_max_history;
    j["min_u_history"] = r.min_u_history;
    j["min_r_history"] = r.min_r_history;
    j["max_r_history"] = r.max_r_history;
    j["step_norm_history"] = r.step_norm_history;
    j["admissibility_breaches"] = r.admissibility_breaches;
    j["line_search_rejections"] = r.line_search_rejections;
    j["message"] = r.message ? json(*r.message) : json(nullptr);
    j["final_graph"] = r.final_graph.to_json();
    return j;
}

json to_json(const estimates::EstimateReport& r) {
    json j = envelope("estimate_report");
    const auto& b = r.c0;
    j["c0"] = {{"min_r", b.min_r},
               {"max_r", b.max_r},
               {"argmin_node", b.argmin_node},
               {"argmax_node", b.argmax_node},
               {"lhs_at_max", b.lhs_at_max},
               {"rhs_at_max", b.rhs_at_max},
               {"lhs_at_min", b.lhs_at_min},
               {"rhs_at_min", b.rhs_at_min},
               {"tolerance_at_max", b.tolerance_at_max},
               {"tolerance_at_min", b.tolerance_at_min},
               {"mesh_spacing", b.mesh_spacing},
               {"pass_at_max", b.pass_at_max},
               {"pass_at_min", b.pass_at_min},
               {"passed", b.passed()}};
    j["c1"] = {{"min_u", r.c1.min_u}, {"argmin_node", r.c1.argmin_node}, {"epsilon0", r.c1.epsilon0}};
    j["c2"] = {{"kappa_max", r.c2.kappa_max},
               {"argmax_node", r.c2.argmax_node},
               {"q_max", r.c2.q_max},
               {"q_argmax_node", r.c2.q_argmax_node},
               {"q_critical_residual", r.c2.q_critical_residual}};
    j["p_range"] = r.p_range;
    return j;
}

json to_json(const estimates::SeriesEntry& e) {
    return {{"step", e.step},
            {"parameter", e.parameter},
            {"converged", e.converged},
            {"kappa_max", e.kappa_max},
            {"min_u", e.min_u},
            {"min_r", e.min_r},
            {"max_r", e.max_r},
            {"barrier_slack_at_max", optional_number(e.barrier_slack_at_max)},
            {"barrier_slack_at_min", optional_number(e.barrier_slack_at_min)},
            {"barrier_passed", e.barrier_passed},
            {"kappa_growth_flag", e.kappa_growth_flag},
            {"min_u_flag", e.min_u_flag}};
}

// ---------------------------------------------------------------------------

solver::PsiSpec psi_from_json(const json& j) {
    return config_guard("psi", [&]() -> solver::PsiSpec {
        const auto kind = require(j, "kind", "psi").get<std::string>();
        if (kind == "constant") return {solver::PsiConstant{require(j, "value", "psi").get<double>()}};
        if (kind == "sphere_exact") return {solver::PsiSphereExact{require(j, "R", "psi").get<double>()}};
        if (kind == "harmonic") {
            solver::PsiHarmonic h;
            h.base = j.value("base", h.base);
            h.amplitude = j.value("amplitude", h.amplitude);
            h.mode = j.value("mode", h.mode);
            h.radial_power = j.value("radial_power", h.radial_power);
            h.lon_amplitude = j.value("lon_amplitude", h.lon_amplitude);
            return {h};
        }
        if (kind == "table") return {solver::PsiTable{require(j, "values", "psi").get<std::vector<double>>()}};
        if (kind == "blend")
            return solver::blend(psi_from_json(require(j, "from", "psi")), psi_from_json(require(j, "to", "psi")),
                                 require(j, "t", "psi").get<double>());
        throw ConfigError("psi: unknown kind '" + kind + "'");
    });
}

solver::Problem problem_from_json(const json& j) {
    return config_guard("problem", [&] {
        solver::Problem p;
        p.n = require(j, "n", "problem").get<int>();
        p.k = require(j, "k", "problem").get<int>();
        p.p = j.value("p", 0.0);
        p.psi = psi_from_json(require(j, "psi", "problem"));
        if (j.contains("warp")) p.warp = Warp::from_json(j.at("warp"));
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            const auto mode = g.value("mode", std::string("axisym"));
            if (mode == "axisym") {
                p.grid.mode = GraphMode::axisym;
            } else if (mode == "grid_s2") {
                p.grid.mode = GraphMode::grid_s2;
            } else {
                throw ConfigError("problem: unknown grid mode '" + mode + "'");
            }
            p.grid.m_theta = g.value("m_theta", p.grid.m_theta);
            p.grid.m_lat = g.value("m_lat", p.grid.m_lat);
            p.grid.m_lon = g.value("m_lon", p.grid.m_lon);
        }
        p.validate();
        return p;
    });
}

solver::SolveOptions options_from_json(const json& j, unsigned threads) {
    return config_guard("options", [&] {
        solver::SolveOptions o;
        o.threads = threads;
        if (j.is_null()) return o;
        if (j.contains("tol") && !j.at("tol").is_null()) o.tol = j.at("tol").get<double>();
        o.max_iter = j.value("max_iter", o.max_iter);
        o.damping = j.value("damping", o.damping);
        if (o.max_iter < 0) throw ConfigError("options: max_iter must be non-negative");
        if (!(o.damping > 0.0 && o.damping <= 1.0)) throw ConfigError("options: damping must lie in (0, 1]");
        return o;
    });
}

estimates::QParams q_params_from_json(const json& j) {
    return config_guard("q_params", [&] {
        estimates::QParams q;
        if (j.is_null()) return q;
        q.N = j.value("N", q.N);
        q.alpha = j.value("alpha", q.alpha);
        q.a = j.value("a", q.a);
        return q;
    });
}

geometry::RadialGraph init_from_json(const json& j, const solver::Problem& problem) {
    return config_guard("init", [&] {
        if (j.is_null()) return solver::default_init(problem);
        const auto kind = require(j, "kind", "init").get<std::string>();
        if (kind == "round") return solver::default_init(problem);
        if (kind == "perturbed_sphere") {
            const double R = j.contains("R") ? j.at("R").get<double>() : solver::round_radius(problem);
            return solver::perturbed_sphere(problem, R, j.value("relative", 0.05));
        }
        if (kind == "graph") return RadialGraph::from_json(require(j, "graph", "init"));
        throw ConfigError("init: unknown kind '" + kind + "'");
    });
}

solver::Path path_from_json(const json& j) {
    return config_guard("path", [&]() -> solver::Path {
        const auto kind = require(j, "kind", "path").get<std::string>();
        if (kind == "p") {
            solver::PPath p;
            p.values = require(j, "values", "path").get<std::vector<double>>();
            if (j.contains("rescale_to_radius") && !j.at("rescale_to_radius").is_null())
                p.rescale_to_radius = j.at("rescale_to_radius").get<double>();
            return p;
        }
        if (kind == "amplitude") {
            solver::AmplitudePath a;
            a.from = psi_from_json(require(j, "from", "path"));
            a.to = psi_from_json(require(j, "to", "path"));
            if (j.contains("t")) {
                a.t = j.at("t").get<std::vector<double>>();
            } else {
                const int steps = require(j, "steps", "path").get<int>();
                if (steps < 1) throw ConfigError("path: steps must be positive");
                for (int i = 0; i <= steps; ++i) a.t.push_back(static_cast<double>(i) / steps);
            }
            return a;
        }
        throw ConfigError("path: unknown kind '" + kind + "'");
    });
}

// ---------------------------------------------------------------------------

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("write failed for " + path.string());
}

void write_timing_sidecar(const std::filesystem::path& report_path, double wall_time_seconds,
                          const std::string& started_at, const std::string& finished_at) {
    auto meta = report_path;
    meta.replace_extension(".meta.json");
    json j = envelope("timing");
    j["report"] = report_path.filename().string();
    j["wall_time_seconds"] = wall_time_seconds;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    write_json(meta, j);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

void write_iterations_csv(std::ostream& out, const solver::SolveReport& r) {
    out << "iteration,residual,kappa_max,min_u,min_r,max_r,step_norm\n";
    for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
        out << i;
        for (const auto* h : {&r.residual_history, &r.kappa_max_history, &r.min_u_history, &r.min_r_history,
                              &r.max_r_history}) {
            out << ',';
            if (i < h->size()) csv_number(out, (*h)[i]);
        }
        out << ',';
        // step i leads from iterate i-1 to iterate i
        if (i > 0 && i - 1 < r.step_norm_history.size()) csv_number(out, r.step_norm_history[i - 1]);
        out << '\n';
    }
}

void write_series_csv(std::ostream& out, const std::vector<estimates::SeriesEntry>& series) {
    out << "step,parameter,converged,kappa_max,min_u,min_r,max_r,barrier_slack_at_max,barrier_slack_at_min,"
           "barrier_passed,kappa_growth_flag,min_u_flag\n";
    for (const auto& e : series) {
        out << e.step << ',';
        csv_number(out, e.parameter);
        out << ',' << e.converged;
        for (double v : {e.kappa_max, e.min_u, e.min_r, e.max_r}) {
            out << ',';
            csv_number(out, v);
        }
        for (const auto& v : {e.barrier_slack_at_max, e.barrier_slack_at_min}) {
            out << ',';
            if (v) csv_number(out, *v);
        }
        out << ',' << e.barrier_passed << ',' << e.kappa_growth_flag << ',' << e.min_u_flag << '\n';
    }
}

void write_gap_csv(std::ostream& out, const campaign::ConcavityReport& r) {
    out << "set,index,gap,lhs,rhs,kappa,xi\n";
    auto rows = [&](const char* name, const std::vector<campaign::Violation>& list) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& v = list[i];
            out << name << ',' << i << ',';
            csv_number(out, v.gap);
            out << ',';
            csv_number(out, v.lhs);
            out << ',';
            csv_number(out, v.rhs);
            out << ',';
            csv_vector(out, v.kappa);
            out << ',';
            csv_vector(out, v.xi);
            out << '\n';
        }
    };
    rows("violation", r.violations);
    rows("tightest", r.tightest);
}

}  // namespace curvlab::io
