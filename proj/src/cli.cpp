#include "maxlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "maxlab/asymptotics.hpp"
#include "maxlab/io.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/parallel.hpp"
#include "maxlab/theorems.hpp"

namespace maxlab::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Options {
    std::string output_dir = ".";
    std::string config_path;
    std::vector<std::string> functions;
    std::string intervals;
    std::vector<double> points;
    std::vector<double> levels;
    std::vector<double> ps;
    std::string op = "centered";
    double p = 2.0;
    double tol = 0.0;
    double rel_tol = 0.0;
    double mode = 0.0;
    double delta = 0.1;
    double lo = 1e-2;
    double hi = 1e3;
    int grid = 10000;
    int n = 1;
    int k = 6;
    int knots = 8000;
    int refine = 8;
    std::string family = "pwl-free";
    int dof = 8;
    int budget = 5000;
    std::uint64_t seed = 1;
    int starts = 4;
    bool maximal = false;
};

struct Outcome {
    Json body = Json::object();
    std::vector<CheckReport> reports;
    std::map<std::string, std::string> extra_files;  // file name -> contents
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

MaximalConfig load_config(const Options& o) {
    if (o.config_path.empty()) return {};
    return io::config_from_json(io::read_json_file(o.config_path));
}

std::vector<PiecewiseLinear> load_functions(const Options& o) {
    if (o.functions.empty()) throw UsageError("--function is required");
    std::vector<PiecewiseLinear> out;
    for (const auto& path : o.functions) out.push_back(io::function_from_json(io::read_json_file(path)));
    return out;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 0.5) / n;
    return xs;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
    return xs;
}

Outcome cmd_eval(const Options& o) {
    if (o.points.empty()) throw UsageError("--points is required");
    if (o.op != "centered" && o.op != "uncentered" && o.op != "f") throw UsageError("--op must be centered|uncentered|f");
    const auto fs = load_functions(o);
    Outcome out;
    std::ostringstream csv;
    csv << "function,x,value\n";
    Json rows = Json::array();
    for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<double> vals(o.points.size());
        parallel_for(o.points.size(), [&](std::size_t j) {
            const double x = o.points[j];
            vals[j] = o.op == "centered" ? centered_max_at(fs[i], x)
                      : o.op == "uncentered" ? uncentered_max_at(fs[i], x, o.refine)
                                             : fs[i].eval(x);
        });
        for (std::size_t j = 0; j < vals.size(); ++j) {
            csv << i << ',' << fmt(o.points[j]) << ',' << fmt(vals[j]) << '\n';
            rows.push_back({{"function", i}, {"x", o.points[j]}, {"value", vals[j]}});
        }
    }
    std::cout << csv.str();
    out.body["values"] = rows;
    out.extra_files["eval.csv"] = csv.str();
    return out;
}

Outcome cmd_norm(const Options& o, const MaximalConfig& cfg) {
    const auto fs = load_functions(o);
    const Exponent p(o.p);
    Outcome out;
    Json rows = Json::array();
    for (const auto& f : fs) {
        Json row{{"norm_p", lp_norm_p(f, p)}, {"norm", lp_norm(f, p)}, {"mass", f.total_mass()}};
        if (o.maximal) {
            const auto step = apply_M(f, p, cfg);
            row["maximal_norm_p"] = step.window_norm_p;
            row["truncation_bound_p"] = step.err_p;
            row["ratio"] = std::pow(step.window_norm_p, 1.0 / p) / lp_norm(f, p);
        }
        rows.push_back(row);
    }
    out.body["norms"] = rows;
    return out;
}

Outcome cmd_sunrise(const Options& o, const MaximalConfig& cfg) {
    if (o.levels.empty()) throw UsageError("--levels is required");
    for (const double l : o.levels)
        if (!(l > 0.0)) throw UsageError("--levels must be positive");
    const auto fs = load_functions(o);
    Outcome out;
    for (const auto& f : fs)
        for (const double l : o.levels) out.reports.push_back(sunrise_check(f, l, cfg, o.rel_tol > 0 ? o.rel_tol : 1e-6));
    return out;
}

Outcome cmd_inclusion(const Options& o) {
    if (o.levels.empty()) throw UsageError("--levels is required");
    if (o.grid < 2) throw UsageError("--grid must be >= 2");
    const auto fs = load_functions(o);
    Outcome out;
    for (const auto& f : fs) {
        if (f.empty()) throw UsageError("inclusion-check: empty function");
        const double w = f.support_hi() - f.support_lo();
        const auto grid = uniform_grid(f.support_lo() - 0.5 * w, f.support_hi() + 0.5 * w, o.grid);
        for (const double l : o.levels) out.reports.push_back(inclusion_check(f, l, grid, o.tol > 0 ? o.tol : 1e-12));
    }
    return out;
}

Outcome cmd_theorem1(const Options& o, const MaximalConfig& cfg) {
    const auto fs = load_functions(o);
    const auto ps = o.ps.empty() ? std::vector<double>{o.p} : o.ps;
    for (const double p : ps)
        if (!(p > 1.0 && p < 2.0)) throw UsageError("theorem1-check: --p must lie in (1, 2)");
    Outcome out;
    for (const auto& f : fs)
        for (const double p : ps) out.reports.push_back(theorem1_check(f, Exponent(p), cfg, o.rel_tol > 0 ? o.rel_tol : 1e-6));
    return out;
}

Outcome cmd_indicator(const Options& o) {
    if (o.intervals.empty()) throw UsageError("--intervals is required");
    const auto e = io::intervals_from_json(io::read_json_file(o.intervals));
    const auto ps = o.ps.empty() ? std::vector<double>{o.p} : o.ps;
    Outcome out;
    for (const double p : ps) {
        const auto r = indicator_check(e, Exponent(p));
        out.reports.push_back(r.norm);
        out.reports.push_back(r.quarter_level);
    }
    return out;
}

Outcome cmd_psi(const Options& o) {
    const auto fs = load_functions(o);
    Outcome out;
    Json psis = Json::array();
    for (const auto& f : fs) {
        const auto w = make_witness(f, o.mode, Exponent(o.p));
        out.reports.push_back(psi_minorant_check(w, o.grid));
        out.reports.push_back(psi_norm_check(w, Exponent(o.p)));
        psis.push_back(io::to_json(w.psi));
    }
    out.body["psi"] = psis;
    return out;
}

Outcome cmd_gbar(const Options& o, const MaximalConfig& cfg) {
    if (o.n < 1) throw UsageError("--n must be >= 1");
    if (o.grid < 1) throw UsageError("--grid must be >= 1");
    if (o.knots < 2) throw UsageError("--knots must be >= 2");
    GbarConfig g;
    g.minorant_knots = o.knots;
    g.tol = o.tol > 0 ? o.tol : 1e-6;
    g.maximal = cfg;
    const double top = std::pow(9.0 / 8.0, o.n);
    std::vector<double> grid(static_cast<std::size_t>(o.grid));
    for (int i = 0; i < o.grid; ++i) grid[static_cast<std::size_t>(i)] = top * (i + 1) / o.grid;
    Outcome out;
    out.reports.push_back(gbar_iterate_check(o.n, grid, g));
    out.body["C_p"] = gbar_constant(Exponent(o.p));
    out.body["implied_n"] = implied_iteration_count(Exponent(o.p));
    return out;
}

Outcome cmd_unimodal(const Options& o, const MaximalConfig& cfg) {
    if (o.n < 1) throw UsageError("--n must be >= 1");
    const auto fs = load_functions(o);
    Outcome out;
    Json rows = Json::array();
    for (const auto& f : fs) {
        const auto w = make_witness(f, o.mode, Exponent(o.p));
        const auto g = unimodal_growth_check(w, Exponent(o.p), o.n, cfg);
        out.reports.push_back(g.chain);
        rows.push_back({{"implied_n", g.implied_n}, {"doubled", g.doubled}, {"psi_growth", io::to_json(g.psi_growth)},
                        {"f_growth", io::to_json(g.f_growth)}});
    }
    out.body["growth"] = rows;
    return out;
}

Outcome cmd_stability(const Options& o, const MaximalConfig& cfg) {
    const auto fs = load_functions(o);
    const auto ps = o.ps.empty() ? std::vector<double>{o.p} : o.ps;
    Outcome out;
    Json eps = Json::array();
    for (const auto& f : fs)
        for (const double p : ps) {
            const auto s = stability_gap_check(f, Exponent(p), cfg, o.rel_tol > 0 ? o.rel_tol : 1e-8);
            out.reports.push_back(s.report);
            eps.push_back({{"p", p}, {"epsilon", s.epsilon}, {"nodes", s.nodes}});
        }
    out.body["epsilon"] = eps;
    return out;
}

Outcome cmd_ap(const Options& o) {
    const auto ps = o.ps.empty() ? std::vector<double>{o.p} : o.ps;
    Outcome out;
    Json rows = Json::array();
    for (const double p : ps) rows.push_back(io::to_json(solve_ap(Exponent(p), o.tol > 0 ? o.tol : 1e-12)));
    out.body["solutions"] = rows;
    return out;
}

Outcome cmd_h(const Options& o) {
    if (!(o.delta > 0.0 && o.delta < o.p - 1.0)) throw UsageError("--delta must lie in (0, p - 1)");
    if (!(o.lo > 0.0 && o.hi > o.lo)) throw UsageError("--lo/--hi must satisfy 0 < lo < hi");
    Outcome out;
    out.reports.push_back(h_domination_check(Exponent(o.p), o.delta, log_grid(o.lo, o.hi, o.grid),
                                             o.rel_tol > 0 ? o.rel_tol : 1e-9));
    return out;
}

Outcome cmd_growth(const Options& o, const MaximalConfig& cfg) {
    if (o.k < 2) throw UsageError("--k must be >= 2");
    const auto fs = load_functions(o);
    Outcome out;
    Json rows = Json::array();
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto r = growth_bracket(fs[i], Exponent(o.p), o.k, cfg);
        rows.push_back(io::to_json(r));
        out.extra_files["growth_" + std::to_string(i) + ".csv"] = io::growth_csv(r);
        bool monotone = true;
        for (const double q : r.ratios) monotone = monotone && q >= 1.0 - 1e-12;
        auto rep = make_report("growth_ratios", monotone ? 1.0 : 0.0, 1.0, 0.0,
                               "ratios >= 1; truncation_bound_p=" + fmt(r.truncation_error_bound_p));
        out.reports.push_back(rep);
    }
    out.body["growth"] = rows;
    return out;
}

Outcome cmd_search(const Options& o, const MaximalConfig& cfg) {
    std::cerr << "# search seed=" << o.seed << " family=" << o.family << " dof=" << o.dof << " budget=" << o.budget
              << '\n';
    Outcome out;
    const auto r = search_extremizer(Exponent(o.p), o.family, o.dof, o.budget, cfg, o.seed, o.starts);
    out.body["header"] = {{"seed", o.seed}, {"family", o.family}, {"dof", o.dof}, {"budget", o.budget}};
    out.body["result"] = io::to_json(r);
    if (o.p < 2.0) {
        out.reports.push_back(make_report("search_theorem1_floor", r.best_ratio, theorem1_constant(Exponent(o.p)), 1e-6,
                                          "best ratio against the p < 2 lower bound"));
    }
    return out;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int finish(const std::string& command, const Json& parameters, Outcome& out, const fs::path& dir) {
    bool pass = true;
    Json reports = Json::array();
    Json failed = Json::array();
    for (const auto& r : out.reports) {
        reports.push_back(io::to_json(r));
        if (!r.pass) {
            pass = false;
            failed.push_back(r.name);
        }
    }
    Json doc{{"command", command}, {"parameters", parameters}, {"pass", pass}};
    for (const auto& [k, v] : out.body.items()) doc[k] = v;
    if (!out.reports.empty()) doc["reports"] = reports;

    fs::create_directories(dir);
    io::write_file_atomic(dir / (command + ".json"), doc.dump(2) + "\n");
    if (!out.reports.empty()) io::write_file_atomic(dir / (command + "_summary.csv"), io::summary_csv(out.reports));
    for (const auto& [name, content] : out.extra_files) io::write_file_atomic(dir / name, content);
    const Json meta{{"command", command}, {"timestamp", timestamp()}, {"threads", worker_count()}};
    io::write_file_atomic(dir / (command + ".meta.json"), meta.dump(2) + "\n");

    if (!pass) {
        std::cout << Json{{"status", "check-failed"}, {"command", command}, {"failed", failed}}.dump() << '\n';
        return kCheckFailed;
    }
    if (command != "eval") std::cout << Json{{"status", "pass"}, {"command", command}}.dump() << '\n';
    return kPass;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Numerical verification lab for the centered maximal operator on the line"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--output-dir", o.output_dir, "Directory for reports")->capture_default_str();
        sub->add_option("--config", o.config_path, "MaximalConfig JSON")->check(CLI::ExistingFile);
    };
    auto with_function = [&](CLI::App* sub) {
        sub->add_option("--function", o.functions, "Function JSON file(s)")->required()->check(CLI::ExistingFile);
    };

    auto* eval = app.add_subcommand("eval", "Evaluate f, Mf or the uncentered maximal function at points");
    with_function(eval);
    eval->add_option("--points", o.points, "Comma separated x values")->delimiter(',')->required();
    eval->add_option("--op", o.op, "centered | uncentered | f")->capture_default_str();
    eval->add_option("--refine", o.refine, "Endpoint refinement for the uncentered search")->capture_default_str();

    auto* norm = app.add_subcommand("norm", "L^p norms of f, optionally of Mf");
    with_function(norm);
    norm->add_option("--p", o.p)->capture_default_str();
    norm->add_flag("--maximal", o.maximal, "Also integrate (Mf)^p");

    auto* sunrise = app.add_subcommand("sunrise-check", "|{Mf >= l}| >= (1/2l) int_{f >= l} f");
    with_function(sunrise);
    sunrise->add_option("--levels", o.levels)->delimiter(',')->required();
    sunrise->add_option("--rel-tol", o.rel_tol, "Relative slack (default 1e-6)");

    auto* inclusion = app.add_subcommand("inclusion-check", "{f > 2l} in {phi > 0} and {phi > 0} u {f >= l} in {Mf >= l}");
    with_function(inclusion);
    inclusion->add_option("--levels", o.levels)->delimiter(',')->required();
    inclusion->add_option("--grid", o.grid, "Number of sample points")->capture_default_str();
    inclusion->add_option("--tol", o.tol, "Relative tolerance on Mf >= l (default 1e-12)");

    auto* t1 = app.add_subcommand("theorem1-check", "||Mf||_p >= (p/(2(p-1)))^{1/p} ||f||_p for 1 < p < 2");
    with_function(t1);
    t1->add_option("--p", o.ps)->delimiter(',');
    t1->add_option("--rel-tol", o.rel_tol, "Relative slack (default 1e-6)");

    auto* ind = app.add_subcommand("indicator-check", "||M 1_E||_p^p >= (1 + 4^-p)|E|");
    ind->add_option("--intervals", o.intervals, "IntervalSet JSON")->required()->check(CLI::ExistingFile);
    ind->add_option("--p", o.ps)->delimiter(',');

    auto* psi = app.add_subcommand("psi-check", "Dyadic minorant psi of a unimodal f");
    with_function(psi);
    psi->add_option("--mode", o.mode)->required();
    psi->add_option("--p", o.p)->capture_default_str();
    psi->add_option("--grid", o.grid, "Samples for psi <= f_tilde")->capture_default_str();

    auto* gb = app.add_subcommand("gbar-check", "M^n gbar(x) >= gbar((8/9)^n x)");
    gb->add_option("--n", o.n)->capture_default_str();
    gb->add_option("--grid", o.grid, "Points in (0, (9/8)^n]")->capture_default_str();
    gb->add_option("--knots", o.knots, "Minorant cells")->capture_default_str();
    gb->add_option("--tol", o.tol, "Absolute tolerance (default 1e-6)");
    gb->add_option("--p", o.p, "Exponent for C_p")->capture_default_str();

    auto* uni = app.add_subcommand("unimodal-check", "||M^n psi||_p^p >= C_p (9/8)^n ||psi||_p^p");
    with_function(uni);
    uni->add_option("--mode", o.mode)->required();
    uni->add_option("--p", o.p)->capture_default_str();
    uni->add_option("--n", o.n)->capture_default_str();

    auto* stab = app.add_subcommand("stability-check", "||Mf||_p^p >= ||f||_p^p + ||Mf - f||_p^p");
    with_function(stab);
    stab->add_option("--p", o.ps)->delimiter(',');
    stab->add_option("--rel-tol", o.rel_tol, "Relative slack (default 1e-8)");

    auto* ap = app.add_subcommand("ap", "Solve M(|x|^{-1/p}) = a_p |x|^{-1/p}");
    ap->add_option("--p", o.ps)->delimiter(',');
    ap->add_option("--tol", o.tol, "Golden-section tolerance (default 1e-12)");

    auto* h = app.add_subcommand("h-check", "Mh <= a_{p-delta} h on a log grid");
    h->add_option("--p", o.p)->capture_default_str();
    h->add_option("--delta", o.delta)->capture_default_str();
    h->add_option("--grid", o.grid)->capture_default_str();
    h->add_option("--lo", o.lo)->capture_default_str();
    h->add_option("--hi", o.hi)->capture_default_str();
    h->add_option("--rel-tol", o.rel_tol, "Relative tolerance (default 1e-9)");

    auto* growth = app.add_subcommand("growth", "||M^k f||_p^{1/k} against the growth bracket");
    with_function(growth);
    growth->add_option("--p", o.p)->capture_default_str();
    growth->add_option("--k", o.k)->capture_default_str();

    auto* search = app.add_subcommand("search", "Nelder-Mead search for small ||Mf||_p / ||f||_p");
    search->add_option("--p", o.p)->capture_default_str();
    search->add_option("--family", o.family, "pwl-free | power-tail")->capture_default_str();
    search->add_option("--dof", o.dof)->capture_default_str();
    search->add_option("--budget", o.budget)->capture_default_str();
    search->add_option("--seed", o.seed)->capture_default_str();
    search->add_option("--starts", o.starts)->capture_default_str();

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cout << Json{{"status", "usage"}, {"error", e.what()}}.dump() << '\n';
        return kUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    Json parameters = Json::object();
    for (const auto* opt : chosen->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "--output-dir" || opt->count() == 0) continue;
        const auto& values = opt->results();
        if (values.size() == 1) {
            parameters[opt->get_name()] = values.front();
        } else {
            parameters[opt->get_name()] = values;
        }
    }
    if (command == "search") parameters["--seed"] = std::to_string(o.seed);

    try {
        const auto cfg = load_config(o);
        Outcome out;
        if (command == "eval") out = cmd_eval(o);
        else if (command == "norm") out = cmd_norm(o, cfg);
        else if (command == "sunrise-check") out = cmd_sunrise(o, cfg);
        else if (command == "inclusion-check") out = cmd_inclusion(o);
        else if (command == "theorem1-check") out = cmd_theorem1(o, cfg);
        else if (command == "indicator-check") out = cmd_indicator(o);
        else if (command == "psi-check") out = cmd_psi(o);
        else if (command == "gbar-check") out = cmd_gbar(o, cfg);
        else if (command == "unimodal-check") out = cmd_unimodal(o, cfg);
        else if (command == "stability-check") out = cmd_stability(o, cfg);
        else if (command == "ap") out = cmd_ap(o);
        else if (command == "h-check") out = cmd_h(o);
        else if (command == "growth") out = cmd_growth(o, cfg);
        else out = cmd_search(o, cfg);
        return finish(command, parameters, out, o.output_dir);
    } catch (const BudgetError& e) {
        std::cerr << "numeric budget exceeded: " << e.what() << '\n';
        std::cout << Json{{"status", "numeric-budget"}, {"command", command}, {"error", e.what()}}.dump() << '\n';
        return kBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        std::cout << Json{{"status", "usage"}, {"command", command}, {"error", e.what()}}.dump() << '\n';
        return kUsage;
    }
}

}  // namespace maxlab::cli
