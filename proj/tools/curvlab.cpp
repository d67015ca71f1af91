#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "curvlab/campaign.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/estimates.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/io.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/solver.hpp"
#include "curvlab/symfunc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace curvlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct RunConfig {
    std::string config_path;
    std::string out_dir = "curvlab_out";
    std::uint64_t seed = 20240430;
    std::optional<unsigned> threads;
    bool quiet = false;
    std::vector<std::string> inputs;  // report only
    // sample-cone overrides
    std::optional<int> n;
    std::optional<int> k;
    std::optional<std::size_t> count;
    std::optional<double> scale;

    unsigned worker_count() const { return threads ? *threads : default_threads(); }
};

class Log {
public:
    explicit Log(bool quiet) : quiet_(quiet) {}
    void operator()(const std::string& line) const {
        if (!quiet_) std::cerr << line << '\n';
    }

private:
    bool quiet_;
};

class Stopwatch {
public:
    Stopwatch() : started_(io::utc_timestamp()), t0_(std::chrono::steady_clock::now()) {}
    void write_sidecar(const fs::path& report) const {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        io::write_timing_sidecar(report, wall, started_, io::utc_timestamp());
    }

private:
    std::string started_;
    std::chrono::steady_clock::time_point t0_;
};

json load_config(const RunConfig& rc) {
    if (rc.config_path.empty()) throw ConfigError("--config is required");
    json j = io::read_json(rc.config_path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("schema_version") && j.at("schema_version") != io::kSchemaVersion)
        throw ConfigError("unsupported config schema_version " + j.at("schema_version").dump());
    return j;
}

fs::path prepare_out(const RunConfig& rc) {
    fs::path out(rc.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory " + out.string());
    return out;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    body(out);
}

// ---------------------------------------------------------------------------
// verify

struct CampaignJob {
    std::string campaign;
    int n = 0;
    int k = 0;
    int l = 0;
    double threshold = 0.0;
    std::size_t budget = 0;
    json entry;

    std::string file_stem() const {
        std::string s = campaign + "_n" + std::to_string(n) + "_k" + std::to_string(k);
        if (campaign == "lu") s += "_l" + std::to_string(l);
        if (campaign == "renwang") {
            std::ostringstream t;
            t << threshold;
            s += "_t" + t.str();
        }
        return s;
    }
};

const std::set<std::string> kLemmaCampaigns = {"sigma-identities", "sigma-l-dominance", "negative-kappa",
                                               "kappa-sq-trace",   "quotient-concavity", "semiconvexity"};

std::pair<int, int> valid_k_range(const std::string& campaign, int n) {
    if (campaign == "sigma-l-dominance" || campaign == "lu") return {2, n};
    if (campaign == "semiconvexity") return {1, n - 1};
    return {1, n};
}

std::vector<int> int_range(const json& j, const std::string& what) {
    if (j.is_number_integer()) return {j.get<int>()};
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
        std::vector<int> v;
        for (int i = j[0].get<int>(); i <= j[1].get<int>(); ++i) v.push_back(i);
        if (v.empty()) throw ConfigError(what + ": empty range");
        return v;
    }
    throw ConfigError(what + ": expected an integer or [lo, hi]");
}

std::vector<int> k_values(const json& j, const std::string& campaign, int n) {
    const auto [lo, hi] = valid_k_range(campaign, n);
    std::vector<int> out;
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "all") {
            for (int k = lo; k <= hi; ++k) out.push_back(k);
        } else if (s.size() > 2 && s.rfind("n-", 0) == 0) {
            out.push_back(n - std::stoi(s.substr(2)));
        } else {
            throw ConfigError(campaign + ": unknown k form '" + s + "'");
        }
        return out;
    }
    if (j.is_array()) {
        // a range is clipped to the campaign's valid k for this n
        for (int k : int_range(j, campaign + ".k"))
            if (k >= lo && k <= hi) out.push_back(k);
        return out;
    }
    return int_range(j, campaign + ".k");
}

std::vector<CampaignJob> expand_campaigns(const json& config) {
    std::vector<CampaignJob> jobs;
    if (!config.contains("campaigns")) throw ConfigError("verify: missing field 'campaigns'");
    const auto& list = config.at("campaigns");
    if (!list.is_array()) throw ConfigError("verify: 'campaigns' must be an array");
    for (const auto& e : list) {
        if (!e.is_object() || !e.contains("campaign")) throw ConfigError("verify: every entry needs 'campaign'");
        const auto name = e.at("campaign").get<std::string>();
        if (!kLemmaCampaigns.count(name) && name != "renwang" && name != "lu")
            throw ConfigError("verify: unknown campaign '" + name + "'");
        if (!e.contains("n") || !e.contains("k") || !e.contains("budget"))
            throw ConfigError("verify: " + name + " needs 'n', 'k' and 'budget'");
        const auto budget = e.at("budget").get<std::size_t>();
        for (int n : int_range(e.at("n"), name + ".n")) {
            for (int k : k_values(e.at("k"), name, n)) {
                CampaignJob job{name, n, k, 0, 0.0, budget, e};
                if (name == "renwang") {
                    const auto& t = e.value("kappa1_threshold", json(10.0));
                    const std::vector<double> thresholds =
                        t.is_array() ? t.get<std::vector<double>>() : std::vector<double>{t.get<double>()};
                    for (double th : thresholds) {
                        job.threshold = th;
                        jobs.push_back(job);
                    }
                } else if (name == "lu") {
                    const auto& lj = e.value("l", json("all"));
                    std::vector<int> ls;
                    if (lj.is_string() && lj.get<std::string>() == "all") {
                        for (int l = 1; l < k; ++l) ls.push_back(l);
                    } else {
                        ls = int_range(lj, "lu.l");
                    }
                    for (int l : ls) {
                        job.l = l;
                        jobs.push_back(job);
                    }
                } else {
                    jobs.push_back(job);
                }
            }
        }
    }
    return jobs;
}

campaign::ConcavityReport run_job(const CampaignJob& job, const campaign::CampaignOptions& opts) {
    using namespace campaign;
    const auto& c = job.campaign;
    if (c == "sigma-identities") return campaign_sigma_identities(job.n, job.k, job.budget, opts);
    if (c == "sigma-l-dominance") return campaign_sigma_l_dominance(job.n, job.k, job.budget, opts);
    if (c == "negative-kappa") return campaign_negative_kappa(job.n, job.k, job.budget, opts);
    if (c == "kappa-sq-trace") return campaign_kappa_sq_trace(job.n, job.k, job.budget, opts);
    if (c == "quotient-concavity") return campaign_quotient_concavity(job.n, job.k, job.budget, opts);
    if (c == "semiconvexity") return campaign_semiconvexity(job.n, job.k, job.budget, opts);
    if (c == "renwang") {
        const auto bounds = job.entry.value("sigma_bounds", std::vector<double>{1.0, 2.0});
        if (bounds.size() != 2) throw ConfigError("renwang: sigma_bounds must have two entries");
        return find_beta(job.n, job.k, bounds[0], bounds[1], job.threshold, job.budget, opts);
    }
    return find_delta_prime(job.n, job.k, job.l, job.entry.value("eps", 0.1), job.entry.value("delta", 1.0 / 3.0),
                            job.entry.value("delta0", 0.5), job.budget, opts);
}

int cmd_verify(const RunConfig& rc) {
    const Log log(rc.quiet);
    const json config = load_config(rc);
    std::vector<CampaignJob> jobs;
    try {
        jobs = expand_campaigns(config);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("verify: ") + e.what());
    }
    const fs::path out = prepare_out(rc);
    const campaign::CampaignOptions opts{rc.seed, rc.worker_count()};
    const Stopwatch total;

    json summary = io::envelope("verify_summary");
    summary["seed"] = rc.seed;
    summary["reports"] = json::array();
    bool all_passed = true;
    for (const auto& job : jobs) {
        const Stopwatch clock;
        json row = {{"campaign", job.campaign}, {"n", job.n}, {"k", job.k}, {"file", job.file_stem() + ".json"}};
        try {
            const auto report = run_job(job, opts);
            const fs::path path = out / (job.file_stem() + ".json");
            io::write_json(path, io::to_json(report));
            clock.write_sidecar(path);
            write_text(out / (job.file_stem() + "_gaps.csv"), [&](std::ostream& s) { io::write_gap_csv(s, report); });
            const bool needs_constant = job.campaign == "renwang" || job.campaign == "lu";
            const bool ok = report.passed() && (!needs_constant || report.found_constant.has_value());
            row["passed"] = ok;
            row["violation_count"] = report.violation_count;
            row["found_constant"] = report.found_constant ? json(*report.found_constant) : json(nullptr);
            all_passed = all_passed && ok;
            log(job.file_stem() + (ok ? ": pass" : ": FAIL") + " (" + std::to_string(report.violation_count) +
                " violations)");
        } catch (const DomainError& e) {
            throw ConfigError(job.file_stem() + ": " + e.what());
        } catch (const SamplerStarvationError& e) {
            row["passed"] = false;
            row["error"] = e.what();
            all_passed = false;
            log(job.file_stem() + ": FAIL (" + e.what() + ")");
        }
        summary["reports"].push_back(row);
    }
    summary["passed"] = all_passed;
    const fs::path path = out / "verify_summary.json";
    io::write_json(path, summary);
    total.write_sidecar(path);
    return all_passed ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// sample-cone

int cmd_sample_cone(const RunConfig& rc) {
    json config = rc.config_path.empty() ? json::object() : load_config(rc);
    const auto get_or = [&](const char* key, auto override_value, auto fallback) {
        using T = decltype(fallback);
        if (override_value) return static_cast<T>(*override_value);
        if (config.contains(key)) {
            try {
                return config.at(key).get<T>();
            } catch (const json::exception& e) {
                throw ConfigError(std::string("sample-cone: ") + key + ": " + e.what());
            }
        }
        return fallback;
    };
    const int n = get_or("n", rc.n, 0);
    const int k = get_or("k", rc.k, 0);
    const auto count = get_or("count", rc.count, std::size_t{1000});
    const double scale = get_or("scale", rc.scale, 1.0);
    if (n < 1 || k < 1 || k > n) throw ConfigError("sample-cone: need 1 <= k <= n (set n and k)");
    if (!(scale > 0.0)) throw ConfigError("sample-cone: scale must be positive");
    const fs::path out = prepare_out(rc);
    const Stopwatch clock;

    std::vector<symfunc::PrincipalCurvatures> samples;
    try {
        samples = symfunc::sample_cone(n, k, count, scale, rc.seed);
    } catch (const SamplerStarvationError& e) {
        Log(rc.quiet)(std::string("sample-cone: ") + e.what());
        return kExitFailure;
    }
    json j = io::envelope("cone_samples");
    j["n"] = n;
    j["k"] = k;
    j["count"] = count;
    j["scale"] = scale;
    j["seed"] = rc.seed;
    j["samples"] = json::array();
    for (const auto& s : samples) j["samples"].push_back(std::vector<double>(s.values().begin(), s.values().end()));
    const fs::path path = out / "cone_samples.json";
    io::write_json(path, j);
    clock.write_sidecar(path);
    write_text(out / "cone_samples.csv", [&](std::ostream& s) {
        s << "index";
        for (int i = 1; i <= n; ++i) s << ",kappa_" << i;
        s << '\n' << std::setprecision(17);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            s << i;
            for (double v : samples[i].values()) s << ',' << v;
            s << '\n';
        }
    });
    Log(rc.quiet)("sample-cone: wrote " + std::to_string(samples.size()) + " samples");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

solver::Problem problem_from_config(const json& config) {
    if (!config.contains("problem")) throw ConfigError("missing field 'problem'");
    return io::problem_from_json(config.at("problem"));
}

json estimate_or_error(const solver::Problem& problem, const geometry::RadialGraph& graph,
                       const estimates::QParams& q, bool& barrier_passed) {
    barrier_passed = false;
    try {
        const auto est = estimates::estimate(problem, graph, q);
        barrier_passed = est.c0.passed();
        return io::to_json(est);
    } catch (const Error& e) {
        json j = io::envelope("estimate_report");
        j["error"] = e.what();
        return j;
    }
}

int cmd_solve(const RunConfig& rc) {
    const Log log(rc.quiet);
    const json config = load_config(rc);
    const auto problem = problem_from_config(config);
    const auto init = io::init_from_json(config.value("init", json(nullptr)), problem);
    const auto opts = io::options_from_json(config.value("options", json(nullptr)), rc.worker_count());
    const auto q = io::q_params_from_json(config.value("q_params", json(nullptr)));
    const fs::path out = prepare_out(rc);
    const Stopwatch clock;

    const auto report = solver::solve(problem, init, opts);
    const fs::path path = out / "solve_report.json";
    io::write_json(path, io::to_json(report));
    clock.write_sidecar(path);
    write_text(out / "iterations.csv", [&](std::ostream& s) { io::write_iterations_csv(s, report); });

    bool barrier_passed = false;
    if (report.converged) {
        const Stopwatch est_clock;
        const fs::path est_path = out / "estimate_report.json";
        io::write_json(est_path, estimate_or_error(problem, report.final_graph, q, barrier_passed));
        est_clock.write_sidecar(est_path);
        try {
            const auto frames = geometry::frame_field(report.final_graph, opts.threads);
            write_text(out / "nodes.csv", [&](std::ostream& s) { geometry::write_csv(s, report.final_graph, frames); });
        } catch (const Error& e) {
            log(std::string("solve: node table skipped: ") + e.what());
        }
    }
    log("solve: " + solver::to_string(report.status) + " after " + std::to_string(report.iterations) +
        " iterations" + (report.message ? " (" + *report.message + ")" : std::string()));
    return report.converged && barrier_passed ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// continue

int cmd_continue(const RunConfig& rc) {
    const Log log(rc.quiet);
    const json config = load_config(rc);
    const auto problem = problem_from_config(config);
    const auto init = io::init_from_json(config.value("init", json(nullptr)), problem);
    const auto opts = io::options_from_json(config.value("options", json(nullptr)), rc.worker_count());
    if (!config.contains("path")) throw ConfigError("continue: missing field 'path'");
    const auto path = io::path_from_json(config.at("path"));
    const fs::path out = prepare_out(rc);
    const Stopwatch total;

    const auto result = solver::continuation(problem, init, path, opts);
    const auto series = estimates::monitor_continuation(result.steps);

    json summary = io::envelope("continuation_report");
    summary["problem"] = io::to_json(problem);
    summary["path"] = config.at("path");
    summary["completed"] = result.completed;
    summary["failure"] = result.failure ? json(*result.failure) : json(nullptr);
    summary["steps"] = json::array();
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%03zu.json", i);
        io::write_json(out / name, io::to_json(result.steps[i].report));
        summary["steps"].push_back({{"file", name},
                                    {"parameter", result.steps[i].parameter},
                                    {"status", solver::to_string(result.steps[i].report.status)}});
    }
    summary["series"] = json::array();
    bool healthy = result.completed;
    for (const auto& e : series) {
        summary["series"].push_back(io::to_json(e));
        healthy = healthy && e.converged && e.barrier_passed && !e.kappa_growth_flag && !e.min_u_flag;
    }
    summary["passed"] = healthy;
    const fs::path summary_path = out / "continuation.json";
    io::write_json(summary_path, summary);
    total.write_sidecar(summary_path);
    write_text(out / "series.csv", [&](std::ostream& s) { io::write_series_csv(s, series); });
    log("continue: " + std::to_string(result.steps.size()) + " steps, " +
        (result.completed ? "completed" : "stopped: " + result.failure.value_or("")));
    return healthy ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// report

bool is_report_file(const fs::path& p) {
    const auto name = p.filename().string();
    auto ends_with = [&](const std::string& suffix) {
        return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return ends_with(".json") && !ends_with(".meta.json");
}

json summarize(const json& doc, bool& ok) {
    const auto kind = doc.at("kind").get<std::string>();
    json row = {{"kind", kind}};
    if (kind == "campaign_report") {
        ok = doc.at("passed").get<bool>();
        row["campaign"] = doc.at("campaign");
        row["params"] = doc.at("params");
        row["violation_count"] = doc.at("violation_count");
        row["found_constant"] = doc.at("found_constant");
    } else if (kind == "solve_report") {
        ok = doc.at("converged").get<bool>();
        row["status"] = doc.at("status");
        row["iterations"] = doc.at("iterations");
        const auto& h = doc.at("residual_history");
        row["final_residual"] = h.empty() ? json(nullptr) : h.back();
    } else if (kind == "estimate_report") {
        ok = !doc.contains("error") && doc.at("c0").at("passed").get<bool>();
        if (!doc.contains("error")) {
            row["min_u"] = doc.at("c1").at("min_u");
            row["kappa_max"] = doc.at("c2").at("kappa_max");
        }
    } else if (kind == "continuation_report") {
        ok = doc.at("passed").get<bool>();
        row["steps"] = doc.at("steps").size();
        row["completed"] = doc.at("completed");
    } else if (kind == "verify_summary") {
        ok = doc.at("passed").get<bool>();
        row["reports"] = doc.at("reports").size();
    } else {
        ok = true;
    }
    row["ok"] = ok;
    return row;
}

std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

int cmd_report(const RunConfig& rc) {
    std::vector<std::string> inputs = rc.inputs;
    if (!rc.config_path.empty()) {
        const json config = load_config(rc);
        if (config.contains("inputs")) {
            try {
                for (const auto& s : config.at("inputs").get<std::vector<std::string>>()) inputs.push_back(s);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("report: inputs: ") + e.what());
            }
        }
    }
    if (inputs.empty()) throw ConfigError("report: no input paths");

    std::vector<std::pair<fs::path, std::string>> files;  // path, display name
    for (const auto& in : inputs) {
        const fs::path root(in);
        if (fs::is_regular_file(root)) {
            files.emplace_back(root, root.filename().string());
        } else if (fs::is_directory(root)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::recursive_directory_iterator(root))
                if (entry.is_regular_file() && is_report_file(entry.path())) found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            for (const auto& p : found) files.emplace_back(p, (root / fs::relative(p, root)).generic_string());
        } else {
            throw ConfigError("report: no such file or directory: " + in);
        }
    }
    const fs::path out = prepare_out(rc);
    const auto out_summary = fs::weakly_canonical(out / "summary.json");

    json summary = io::envelope("summary");
    summary["entries"] = json::array();
    bool all_ok = true;
    for (const auto& [path, name] : files) {
        if (fs::weakly_canonical(path) == out_summary) continue;
        const json doc = io::read_json(path);
        if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("kind"))
            throw ConfigError("report: " + path.string() + " lacks schema_version/kind");
        if (doc.at("schema_version") != io::kSchemaVersion)
            throw ConfigError("report: " + path.string() + " has unsupported schema_version");
        if (doc.at("kind") == "summary" || doc.at("kind") == "timing") continue;
        bool ok = true;
        json row;
        try {
            row = summarize(doc, ok);
        } catch (const json::exception& e) {
            throw ConfigError("report: " + path.string() + ": " + e.what());
        }
        row["file"] = name;
        all_ok = all_ok && ok;
        summary["entries"].push_back(row);
    }
    summary["all_ok"] = all_ok;
    io::write_json(out / "summary.json", summary);
    write_text(out / "summary.csv", [&](std::ostream& s) {
        s << "file,kind,ok\n";
        for (const auto& row : summary["entries"])
            s << csv_field(row["file"].get<std::string>()) << ',' << row["kind"].get<std::string>() << ','
              << (row["ok"].get<bool>() ? 1 : 0) << '\n';
    });
    Log(rc.quiet)("report: " + std::to_string(summary["entries"].size()) + " entries");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvlab: sigma_k lemma campaigns, radial-graph curvature solver and estimate monitors"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig rc;
    app.add_option("--config", rc.config_path, "JSON config file");
    app.add_option("--out", rc.out_dir, "Output directory (created if missing)");
    app.add_option("--seed", rc.seed, "Base seed for randomized campaigns");
    app.add_option("--threads", rc.threads, "Worker threads (default: CURVLAB_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", rc.quiet, "Suppress progress output");

    auto* verify = app.add_subcommand("verify", "Run lemma verification campaigns");
    auto* sample = app.add_subcommand("sample-cone", "Draw samples of the Garding cone");
    sample->add_option("--n", rc.n, "Dimension");
    sample->add_option("--k", rc.k, "Cone index");
    sample->add_option("--count", rc.count, "Number of samples");
    sample->add_option("--scale", rc.scale, "Sampler scale");
    auto* solve = app.add_subcommand("solve", "Solve one problem and evaluate estimates");
    auto* cont = app.add_subcommand("continue", "Run a continuation schedule");
    auto* report = app.add_subcommand("report", "Aggregate JSON outputs into a summary");
    report->add_option("inputs", rc.inputs, "Report files or directories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*verify) return cmd_verify(rc);
        if (*sample) return cmd_sample_cone(rc);
        if (*solve) return cmd_solve(rc);
        if (*cont) return cmd_continue(rc);
        if (*report) return cmd_report(rc);
    } catch (const ConfigError& e) {
        std::cerr << "curvlab: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "curvlab: error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitConfig;
}
