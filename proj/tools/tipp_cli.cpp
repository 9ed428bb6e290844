// Command-line front end: gen, fit, plan, eval, bound, bench.
// Reports go to stdout as one JSON document; data files are plain text.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <tipp/tipp.hpp>

using nlohmann::ordered_json;

namespace {

ordered_json quantity(double v, const char* unit) { return {{"value", v}, {"unit", unit}}; }

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ordered_json provenance(std::optional<std::uint64_t> seed) {
    ordered_json p;
    p["tool"] = "tipp";
    p["version"] = tipp::kVersion;
    p["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    p["timestamp"] = timestamp();
    return p;
}

unsigned env_threads() {
    const char* v = std::getenv("TRANSECT_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 0) throw tipp::Error(tipp::ErrorKind::InvalidArgument, "TRANSECT_THREADS must be a non-negative integer");
    return static_cast<unsigned>(n);
}

void emit(const ordered_json& report) { std::cout << report.dump(2) << '\n'; }

ordered_json grid_json(const tipp::TransectGrid& g) {
    return {{"rows", g.rows},
            {"cols", g.cols},
            {"spacing_h", quantity(g.spacing_h, "m")},
            {"spacing_v", quantity(g.spacing_v, "m")}};
}

ordered_json params_json(const tipp::GpHyperParams& p) {
    return {{"signal_variance", quantity(p.signal_variance, "field units^2")},
            {"noise_variance", quantity(p.noise_variance, "field units^2")},
            {"lengthscale_h", quantity(p.lengthscale_h, "m")},
            {"lengthscale_v", quantity(p.lengthscale_v, "m")},
            {"prior_mean", quantity(p.prior_mean, "field units")},
            {"eta", quantity(p.eta(), "dimensionless")}};
}

ordered_json counters_json(const tipp::PlanCounters& c) {
    return {{"entropy_evals", c.entropy_evals},
            {"entropy_computations", c.entropy_computations},
            {"mi_evals", c.mi_evals},
            {"mi_computations", c.mi_computations},
            {"linalg_work", c.linalg_work}};
}

// Shared flag groups ---------------------------------------------------------

struct GridFlags {
    int rows = 0;
    int cols = 0;
    double spacing_h = 1.0;
    double spacing_v = 1.0;

    void add(CLI::App* app, bool required) {
        auto* r = app->add_option("--rows", rows, "grid rows r");
        auto* c = app->add_option("--cols", cols, "grid columns n");
        if (required) {
            r->required();
            c->required();
        }
        app->add_option("--spacing-h", spacing_h, "column spacing (m)");
        app->add_option("--spacing-v", spacing_v, "row spacing (m)");
    }
    [[nodiscard]] tipp::TransectGrid grid() const { return {rows, cols, spacing_h, spacing_v}; }
};

struct ParamFlags {
    std::optional<double> l1, l2, sig2, noise2, mean;

    void add(CLI::App* app) {
        app->add_option("--l1", l1, "horizontal length-scale (m)");
        app->add_option("--l2", l2, "vertical length-scale (m)");
        app->add_option("--sig2", sig2, "signal variance");
        app->add_option("--noise2", noise2, "noise variance");
        app->add_option("--mean", mean, "constant prior mean");
    }
    [[nodiscard]] bool complete() const { return l1 && l2 && sig2 && noise2; }
    [[nodiscard]] tipp::GpHyperParams params() const {
        if (!complete()) throw tipp::Error(tipp::ErrorKind::InvalidArgument, "--l1, --l2, --sig2 and --noise2 are required");
        return {*sig2, *noise2, *l1, *l2, mean.value_or(0.0)};
    }
};

/// Params from flags, or fitted to the field when flags are incomplete.
tipp::GpHyperParams resolve_params(const ParamFlags& pf, const std::optional<tipp::FieldRealization>& field,
                                   ordered_json& report) {
    if (pf.complete()) {
        report["params_source"] = "flags";
        return pf.params();
    }
    if (!field) throw tipp::Error(tipp::ErrorKind::InvalidArgument, "hyperparameters need flags or a --field to fit");
    auto search = tipp::default_search(*field);
    search.threads = env_threads();
    if (pf.mean) search.prior_mean = pf.mean;
    report["params_source"] = "mle";
    return tipp::fit_mle(*field, search);
}

ordered_json metrics_json(const tipp::Path& path, const tipp::FieldRealization& field, tipp::GpHyperParams params,
                          std::optional<double> mean) {
    ordered_json m;
    if (static_cast<int>(path.robots()) >= field.grid.rows) {
        m["note"] = "no unobserved locations";
        return m;
    }
    m["EN"] = quantity(tipp::en_metric(path, field.grid, params), "nats");
    m["MI"] = quantity(tipp::mi_metric(path, field.grid, params), "nats");
    params.prior_mean = mean ? *mean : tipp::plug_in_mean(path, field);
    m["ER_prior_mean"] = quantity(params.prior_mean, "field units");
    m["ER_prior_mean_source"] = mean ? "flag" : "path sample mean";
    try {
        m["ER"] = quantity(tipp::er_metric(path, field, params), "dimensionless");
    } catch (const tipp::Error& e) {
        if (e.kind() != tipp::ErrorKind::ZeroMeanField) throw;
        m["ER"] = nullptr;
        m["ER_note"] = e.what();
    }
    return m;
}

std::optional<ordered_json> bound_json(const tipp::PlanRequest& req) {
    const bool mepp = req.algorithm == tipp::Algorithm::MeppM;
    const bool m2ipp = req.algorithm == tipp::Algorithm::M2ippM;
    if (!mepp && !m2ipp) return std::nullopt;
    const tipp::BoundInputs b{req.k, req.grid.cols, req.m, req.grid.rows, req.params.lengthscale_h / req.grid.spacing_h,
                              req.params.eta()};
    ordered_json out;
    out["kind"] = mepp ? "entropy" : "mutual information";
    try {
        out["epsilon"] = quantity(mepp ? tipp::epsilon_mepp(b) : tipp::epsilon_m2ipp(b), "nats");
    } catch (const tipp::Error& e) {
        if (e.kind() != tipp::ErrorKind::DegenerateNoise) throw;
        out["epsilon"] = nullptr;
        out["note"] = e.what();
    }
    return out;
}

// Subcommands ----------------------------------------------------------------

struct GenCmd {
    GridFlags grid;
    ParamFlags params;
    std::uint64_t seed = 0;
    std::string out;

    void run() const {
        const tipp::FieldSpec spec{grid.grid(), params.params(), seed};
        const auto field = tipp::sample_field(spec);
        tipp::save_field_csv(out, field);
        ordered_json r;
        r["command"] = "gen";
        r["grid"] = grid_json(spec.grid);
        r["params"] = params_json(spec.params);
        r["output"] = out;
        r["provenance"] = provenance(seed);
        emit(r);
    }
};

struct FitCmd {
    std::string field_path;
    int points = 8;
    int rounds = 3;
    ParamFlags fixed;

    void run() const {
        const auto field = tipp::load_field_csv(field_path);
        auto search = tipp::default_search(field);
        search.points = points;
        search.rounds = rounds;
        search.threads = env_threads();
        // A supplied value collapses that axis of the search.
        auto pin = [](tipp::SearchRange& r, const std::optional<double>& v) {
            if (v) r = {*v, *v};
        };
        pin(search.signal_variance, fixed.sig2);
        pin(search.noise_variance, fixed.noise2);
        pin(search.lengthscale_h, fixed.l1);
        pin(search.lengthscale_v, fixed.l2);
        if (fixed.mean) search.prior_mean = fixed.mean;
        const auto fit = tipp::fit_mle(field, search);
        ordered_json r;
        r["command"] = "fit";
        r["field"] = field_path;
        r["grid"] = grid_json(field.grid);
        r["search"] = {{"points", points}, {"rounds", rounds}};
        r["params"] = params_json(fit);
        r["log_marginal_likelihood"] = quantity(tipp::log_marginal_likelihood(field, fit), "nats");
        r["provenance"] = provenance(std::nullopt);
        emit(r);
    }
};

struct PlanCmd {
    std::string algo;
    int m = 0;
    int robots = 1;
    std::string field_path;
    GridFlags grid;
    ParamFlags params;
    std::string out;
    std::uint64_t budget = tipp::kDefaultBudget;
    std::optional<std::uint64_t> seed;

    void run() const {
        ordered_json r;
        r["command"] = "plan";
        std::optional<tipp::FieldRealization> field;
        if (!field_path.empty()) field = tipp::load_field_csv(field_path);

        tipp::PlanRequest req;
        req.algorithm = tipp::parse_algorithm(algo);
        if ((req.algorithm == tipp::Algorithm::MeppM || req.algorithm == tipp::Algorithm::M2ippM) && m < 1)
            throw tipp::Error(tipp::ErrorKind::InvalidArgument, "--m is required for mepp and m2ipp");
        req.m = std::max(m, 1);
        req.k = robots;
        req.grid = field ? field->grid : grid.grid();
        req.params = resolve_params(params, field, r);
        req.budget_guard = budget;
        req.threads = env_threads();

        const auto result = tipp::plan(req);
        if (!out.empty()) tipp::save_path(out, result.path);

        r["request"] = {{"algo", tipp::algorithm_name(req.algorithm)},
                        {"m", uses_order(req.algorithm) ? ordered_json(req.m) : ordered_json(nullptr)},
                        {"robots", req.k},
                        {"field", field_path.empty() ? ordered_json(nullptr) : ordered_json(field_path)},
                        {"budget", req.budget_guard}};
        r["grid"] = grid_json(req.grid);
        r["params"] = params_json(req.params);
        r["result"] = {{"objective", quantity(result.objective, "nats")},
                       {"counters", counters_json(result.counters)},
                       {"wall_time", quantity(result.wall_time, "seconds")},
                       {"path_file", out.empty() ? ordered_json(nullptr) : ordered_json(out)}};
        if (out.empty()) {
            std::ostringstream p;
            tipp::write_path(p, result.path);
            r["result"]["path"] = p.str();
        }
        if (auto b = bound_json(req)) r["bound"] = *b;
        if (field) r["metrics"] = metrics_json(result.path, *field, req.params, params.mean);
        r["provenance"] = provenance(seed);
        emit(r);
    }

    static bool uses_order(tipp::Algorithm a) { return a == tipp::Algorithm::MeppM || a == tipp::Algorithm::M2ippM; }
};

struct EvalCmd {
    std::string path_file;
    std::string field_path;
    ParamFlags params;

    void run() const {
        ordered_json r;
        r["command"] = "eval";
        const auto field = tipp::load_field_csv(field_path);
        const auto path = tipp::load_path(path_file);
        tipp::validate_path(path, field.grid);
        const auto p = resolve_params(params, field, r);
        r["path"] = path_file;
        r["field"] = field_path;
        r["grid"] = grid_json(field.grid);
        r["params"] = params_json(p);
        if (static_cast<int>(path.robots()) >= field.grid.rows)
            throw tipp::Error(tipp::ErrorKind::NoUnobserved, "path samples every location");
        r["metrics"] = metrics_json(path, field, p, params.mean);
        r["provenance"] = provenance(std::nullopt);
        emit(r);
    }
};

struct BoundCmd {
    tipp::BoundInputs b;
    std::string sweep_out;

    void run() const {
        ordered_json r;
        r["command"] = "bound";
        r["inputs"] = {{"k", b.k},
                       {"n", b.n},
                       {"m", b.m},
                       {"r", b.r},
                       {"lengthscale_norm_h", quantity(b.lengthscale_norm_h, "columns")},
                       {"eta", quantity(b.eta, "dimensionless")}};
        r["xi"] = quantity(b.xi(), "dimensionless");
        r["epsilon_mepp"] = b.m <= b.n ? quantity(tipp::epsilon_mepp(b), "nats") : ordered_json(nullptr);
        r["epsilon_m2ipp"] = 2 * b.m <= b.n ? quantity(tipp::epsilon_m2ipp(b), "nats") : ordered_json(nullptr);
        ordered_json cost;
        for (auto a : {tipp::Algorithm::MeppM, tipp::Algorithm::M2ippM, tipp::Algorithm::Gmepp, tipp::Algorithm::Gm2ipp,
                       tipp::Algorithm::ExactMepp, tipp::Algorithm::ExactM2ipp})
            cost[tipp::algorithm_name(a)] = quantity(tipp::cost_model(a, b), "operations");
        r["cost_model"] = cost;
        if (!sweep_out.empty()) {
            std::ofstream os(sweep_out);
            if (!os) throw tipp::Error(tipp::ErrorKind::Io, "cannot write " + sweep_out);
            os << "# m epsilon_mepp_nats epsilon_m2ipp_nats\n";
            auto s = b;
            for (s.m = 1; s.m <= b.n; ++s.m) {
                os << s.m << ' ' << tipp::format_decimal(tipp::epsilon_mepp(s)) << ' ';
                os << (2 * s.m <= s.n ? tipp::format_decimal(tipp::epsilon_m2ipp(s)) : std::string("nan")) << '\n';
            }
            if (!os) throw tipp::Error(tipp::ErrorKind::Io, "write failed for " + sweep_out);
            r["sweep_file"] = sweep_out;
        }
        r["provenance"] = provenance(std::nullopt);
        emit(r);
    }
};

struct BenchCmd {
    std::vector<std::string> algos{"mepp"};
    int m_min = 1;
    int m_max = 1;
    int reps = 1;
    int robots = 1;
    GridFlags grid;
    ParamFlags params;
    std::uint64_t budget = tipp::kDefaultBudget;
    std::string out;

    void run() const {
        if (m_min < 1 || m_max < m_min || reps < 1)
            throw tipp::Error(tipp::ErrorKind::InvalidArgument, "need 1 <= m-min <= m-max and reps >= 1");
        std::ofstream os(out);
        if (!os) throw tipp::Error(tipp::ErrorKind::Io, "cannot write " + out);
        ordered_json r;
        r["command"] = "bench";
        r["grid"] = grid_json(grid.grid());
        r["params"] = params_json(params.params());
        ordered_json runs = ordered_json::array();
        bool first_block = true;
        for (const auto& name : algos) {
            const auto algo = tipp::parse_algorithm(name);
            if (!first_block) os << "\n\n";
            first_block = false;
            os << "# algo=" << name << " rows=" << grid.rows << " cols=" << grid.cols << " robots=" << robots
               << " reps=" << reps << "\n# m median_wall_time_seconds\n";
            for (int m = m_min; m <= m_max; ++m) {
                tipp::PlanRequest req;
                req.grid = grid.grid();
                req.params = params.params();
                req.k = robots;
                req.algorithm = algo;
                req.m = m;
                req.budget_guard = budget;
                req.threads = env_threads();
                std::vector<double> times;
                ordered_json entry{{"algo", name}, {"m", m}};
                try {
                    tipp::PlanResult last;
                    for (int i = 0; i < reps; ++i) {
                        last = tipp::plan(req);
                        times.push_back(last.wall_time);
                    }
                    std::sort(times.begin(), times.end());
                    const double median = times.size() % 2 ? times[times.size() / 2]
                                                           : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
                    os << m << ' ' << tipp::format_decimal(median) << '\n';
                    entry["median_wall_time"] = quantity(median, "seconds");
                    entry["objective"] = quantity(last.objective, "nats");
                    entry["counters"] = counters_json(last.counters);
                } catch (const tipp::Error& e) {
                    entry["error"] = {{"kind", tipp::to_string(e.kind())}, {"message", e.what()}};
                }
                runs.push_back(entry);
            }
        }
        if (!os) throw tipp::Error(tipp::ErrorKind::Io, "write failed for " + out);
        r["runs"] = runs;
        r["data_file"] = out;
        r["provenance"] = provenance(std::nullopt);
        emit(r);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transect informative path planning"};
    app.set_version_flag("--version", std::string(tipp::kVersion));
    app.require_subcommand(1);

    GenCmd gen;
    auto* gen_app = app.add_subcommand("gen", "sample a synthetic field and write it as CSV");
    gen.grid.add(gen_app, true);
    gen.params.add(gen_app);
    gen_app->add_option("--seed", gen.seed, "generator seed");
    gen_app->add_option("--out", gen.out, "output field file")->required();

    FitCmd fit;
    auto* fit_app = app.add_subcommand("fit", "maximum-likelihood hyperparameters for a field");
    fit_app->add_option("--field", fit.field_path, "field file")->required();
    fit_app->add_option("--points", fit.points, "grid points per axis");
    fit_app->add_option("--rounds", fit.rounds, "refinement rounds");
    fit.fixed.add(fit_app);

    PlanCmd plan_cmd;
    auto* plan_app = app.add_subcommand("plan", "plan a path");
    plan_app->add_option("--algo", plan_cmd.algo, "mepp, m2ipp, gmepp, gm2ipp, exact-mepp or exact-m2ipp")->required();
    plan_app->add_option("--m", plan_cmd.m, "Markov order (mepp, m2ipp)");
    plan_app->add_option("--robots", plan_cmd.robots, "robots k");
    plan_app->add_option("--field", plan_cmd.field_path, "field file (grid, metrics, MLE when params are absent)");
    plan_cmd.grid.add(plan_app, false);
    plan_cmd.params.add(plan_app);
    plan_app->add_option("--out", plan_cmd.out, "output path file");
    plan_app->add_option("--budget", plan_cmd.budget, "refuse above this many table entries or enumerated paths");
    plan_app->add_option("--seed", plan_cmd.seed, "seed of the field, echoed into the report");

    EvalCmd eval;
    auto* eval_app = app.add_subcommand("eval", "EN, MI and ER of a path on a field");
    eval_app->add_option("--path", eval.path_file, "path file")->required();
    eval_app->add_option("--field", eval.field_path, "field file")->required();
    eval.params.add(eval_app);

    BoundCmd bound;
    auto* bound_app = app.add_subcommand("bound", "loss bounds and cost models");
    bound_app->add_option("--k", bound.b.k, "robots")->required();
    bound_app->add_option("--n", bound.b.n, "columns")->required();
    bound_app->add_option("--m", bound.b.m, "Markov order")->required();
    bound_app->add_option("--r", bound.b.r, "rows")->required();
    bound_app->add_option("--l1-norm", bound.b.lengthscale_norm_h, "horizontal length-scale in column spacings")->required();
    bound_app->add_option("--eta", bound.b.eta, "noise-to-signal ratio")->required();
    bound_app->add_option("--sweep-m", bound.sweep_out, "write (m, epsilon) for m = 1..n to this file");

    BenchCmd bench;
    auto* bench_app = app.add_subcommand("bench", "median planning time per (algo, m)");
    bench_app->add_option("--algos", bench.algos, "algorithms")->delimiter(',');
    bench_app->add_option("--m-min", bench.m_min, "smallest m");
    bench_app->add_option("--m-max", bench.m_max, "largest m");
    bench_app->add_option("--reps", bench.reps, "repetitions per point");
    bench_app->add_option("--robots", bench.robots, "robots k");
    bench.grid.add(bench_app, true);
    bench.params.add(bench_app);
    bench_app->add_option("--budget", bench.budget, "per-run budget guard");
    bench_app->add_option("--out", bench.out, "output data file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen_app->parsed()) gen.run();
        else if (fit_app->parsed()) fit.run();
        else if (plan_app->parsed()) plan_cmd.run();
        else if (eval_app->parsed()) eval.run();
        else if (bound_app->parsed()) bound.run();
        else if (bench_app->parsed()) bench.run();
    } catch (const tipp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return tipp::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    }
    return 0;
}
