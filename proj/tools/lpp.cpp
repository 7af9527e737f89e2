// lpp: command-line front end for the half-space LPP experiments and the
// Fredholm Pfaffian evaluator.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <map>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <hslpp/experiments/comparisons.hpp>
#include <hslpp/experiments/covariance.hpp>
#include <hslpp/experiments/crossing.hpp>
#include <hslpp/experiments/kernel_check.hpp>
#include <hslpp/experiments/localization.hpp>
#include <hslpp/experiments/modulus.hpp>
#include <hslpp/experiments/tails.hpp>
#include <hslpp/geodesic.hpp>

#include "params.hpp"

namespace {

using namespace hslpp;
using namespace hslpp::experiments;
using lpp_cli::Param;
using lpp_cli::usage_error;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

// Output of one subcommand: CSV text plus the summary for the sidecar.
struct Outcome {
    std::string csv;
    nlohmann::json summary;
    std::vector<std::string> failures;
};

struct Command {
    std::string name;
    std::string anchor;
    std::string csv_columns;
    std::vector<Param> params; // experiment-specific keys
    std::function<Outcome(const RunOptions&)> run;
    std::int64_t default_replicas = 1000;
};

Outcome from_report(const Report& r)
{
    std::ostringstream os;
    write_csv(os, r);
    return {os.str(), summary_json(r), r.failures};
}

const std::string kReportColumns = kCsvHeader;

std::vector<std::unique_ptr<Command>> make_commands()
{
    std::vector<std::unique_ptr<Command>> cmds;
    auto add = [&](Command c) { cmds.push_back(std::make_unique<Command>(std::move(c))); };

    {
        auto cfg = std::make_shared<ComparisonConfig>();
        auto pairs = std::make_shared<std::int64_t>(cfg->pairs);
        add({"comparisons",
             "pathwise increment comparisons under the coupling (boundary-ordered and crossing-conditional)",
             kReportColumns,
             {{"N", "system size", &cfg->frame.N},
              {"delta", "density offset delta", &cfg->frame.delta},
              {"kappa", "density gap kappa (> 0)", &cfg->frame.kappa},
              {"pairs", "random pairs p <= q per replica", pairs.get()},
              {"ab_low", "smaller alpha-beta parameter", &cfg->ab_low},
              {"ab_high", "larger alpha-beta parameter", &cfg->ab_high}},
             [cfg, pairs](const RunOptions& r) {
                 cfg->pairs = static_cast<int>(*pairs);
                 return from_report(check_comparisons(*cfg, r));
             },
             1000});
    }
    {
        auto cfg = std::make_shared<CrossingConfig>();
        add({"crossing", "probability of a bulk crossing of the stationary and point-to-point geodesics",
             kReportColumns,
             {{"N", "system size", &cfg->N},
              {"delta", "density offset delta", &cfg->delta},
              {"gaps", "values of kappa - delta", &cfg->gaps},
              {"u1", "offset of p", &cfg->u1},
              {"u2", "offset of q", &cfg->u2},
              {"min_probability", "required crossing probability at the largest gap", &cfg->min_probability}},
             [cfg](const RunOptions& r) { return from_report(crossing_sweep(*cfg, r)); },
             5000});
    }
    {
        auto cfg = std::make_shared<LocalizationConfig>();
        add({"localization", "geodesic localization near the diagonal, cubic decay in M", kReportColumns,
             {{"N", "system size", &cfg->N},
              {"delta", "density offset delta", &cfg->delta},
              {"m1", "endpoint offset M1", &cfg->m1},
              {"m_values", "line offsets M", &cfg->m_values},
              {"tau", "start of the tilted model's zero zone", &cfg->tau}},
             [cfg](const RunOptions& r) { return from_report(localization_profile(*cfg, r)); },
             20000});
    }
    {
        auto cfg = std::make_shared<CovarianceConfig>();
        auto model = std::make_shared<std::string>("stationary");
        add({"covariance", "two-time covariance decomposition and its stationary oracle", kReportColumns,
             {{"N", "system size", &cfg->frame.N},
              {"tau", "earlier time tau in (0,1)", &cfg->frame.tau},
              {"delta", "density offset delta", &cfg->frame.delta},
              {"m1_tilde", "rescaled offset at time 1", &cfg->frame.m1_tilde},
              {"mtau_tilde", "rescaled offset at time tau", &cfg->frame.mtau_tilde},
              {"model", "pp or stationary", model.get()},
              {"oracle", "compare var_diff with the (1-tau)N stationary oracle", &cfg->oracle},
              {"oracle_tolerance", "absolute tolerance of the oracle comparison", &cfg->oracle_tolerance},
              {"trend_taus", "optional tau sweep comparing pp and stationary", &cfg->trend_taus}},
             [cfg, model](const RunOptions& r) {
                 if (*model == "pp") {
                     cfg->model = CovModel::PointToPoint;
                 } else if (*model == "stationary") {
                     cfg->model = CovModel::Stationary;
                 } else {
                     throw usage_error("model must be 'pp' or 'stationary'");
                 }
                 return from_report(covariance_experiment(*cfg, r));
             },
             100000});
    }
    {
        auto cfg = std::make_shared<OrderedRvConfig>();
        add({"ordered-rv", "second-moment bound for ordered variables on coupled stationary increments",
             kReportColumns,
             {{"N", "system size", &cfg->frame.N},
              {"tau", "time tau in (0,1)", &cfg->frame.tau},
              {"delta", "density offset delta", &cfg->frame.delta},
              {"kappa", "density gap kappa", &cfg->frame.kappa},
              {"mtau_tilde", "rescaled offset at time tau", &cfg->frame.mtau_tilde},
              {"r_factors", "R values in units of (1-tau)^{-4/15}", &cfg->r_factors}},
             [cfg](const RunOptions& r) { return from_report(ordered_rv_experiment(*cfg, r)); },
             20000});
    }
    {
        auto cfg = std::make_shared<TailsConfig>();
        add({"tails", "random-walk, last-passage and diagonal lower-tail bounds", kReportColumns,
             {{"N", "system size of the last-passage tails", &cfg->lpp.N},
              {"u", "endpoint offset of the last-passage tails", &cfg->lpp.u},
              {"upper_s", "upper-tail distances S", &cfg->lpp.upper_s},
              {"lower_s", "lower-tail distances S", &cfg->lpp.lower_s},
              {"walk_n", "system size of the random walk", &cfg->walk.N},
              {"L", "random-walk horizon", &cfg->walk.L},
              {"walk_kappa", "random-walk density parameter", &cfg->walk.kappa},
              {"xi", "random-walk levels", &cfg->walk.xi},
              {"rhp_n", "system size of the diagonal lower tail", &cfg->rhp.N},
              {"w", "diagonal strengths w (< 0)", &cfg->rhp.w},
              {"mu", "levels mu in (0,4)", &cfg->rhp.mu},
              {"anchor_w", "w of the point where C is fitted", &cfg->rhp.anchor_w},
              {"anchor_mu", "mu of the point where C is fitted", &cfg->rhp.anchor_mu},
              {"with_walk", "run the random-walk part", &cfg->with_walk},
              {"with_lpp", "run the last-passage part", &cfg->with_lpp},
              {"with_rhp", "run the diagonal lower-tail part", &cfg->with_rhp}},
             [cfg](const RunOptions& r) { return from_report(tails_experiment(*cfg, r)); },
             20000});
    }
    {
        auto cfg = std::make_shared<ModulusConfig>();
        add({"modulus", "modulus of continuity of the rescaled point-to-point profile", kReportColumns,
             {{"N", "system size", &cfg->frame.N},
              {"delta", "density offset delta", &cfg->frame.delta},
              {"u_max", "profile range [0, u_max]", &cfg->u_max},
              {"delta_grid", "window widths", &cfg->delta_grid},
              {"eps_grid", "oscillation levels", &cfg->eps_grid}},
             [cfg](const RunOptions& r) { return from_report(modulus_of_continuity(*cfg, r)); },
             2000});
    }
    {
        auto cfg = std::make_shared<KernelConfig>();
        auto grid = std::make_shared<std::string>("auto");
        auto m_max = std::make_shared<std::int64_t>(cfg->m_max);
        auto nodes = std::make_shared<std::int64_t>(cfg->quad.nodes);
        auto contour = std::make_shared<std::int64_t>(cfg->contour_points);
        add({"kernel", "Fredholm Pfaffian CDF of the zero-diagonal model", "S,cdf,truncation_bound,quad_points",
             {{"N", "system size", &cfg->N},
              {"u2", "endpoint offset", &cfg->u2},
              {"gap", "kappa - delta (> 0)", &cfg->gap},
              {"s_grid", "'auto' or comma-separated S values", grid.get()},
              {"m_max", "series truncation order", m_max.get()},
              {"nodes", "Gauss-Legendre nodes on the half-line", nodes.get()},
              {"scale", "half-line map scale (0: fluctuation unit)", &cfg->quad.scale},
              {"tolerance", "largest acceptable truncation bound", &cfg->quad.tolerance},
              {"contour_points", "trapezoid points per contour", contour.get()}},
             [cfg, grid, m_max, nodes, contour](const RunOptions&) {
                 cfg->s_grid = *grid == "auto" ? std::vector<double>{} : lpp_cli::parse_list(*grid, "s_grid");
                 cfg->m_max = static_cast<int>(*m_max);
                 cfg->quad.nodes = static_cast<int>(*nodes);
                 cfg->contour_points = static_cast<int>(*contour);
                 const auto rows = kernel_cdf_table(*cfg);
                 Outcome o;
                 std::ostringstream os;
                 write_kernel_csv(os, rows);
                 o.csv = os.str();
                 for (const auto& r : rows) {
                     if (!(r.r.cdf >= -cfg->quad.tolerance && r.r.cdf <= 1.0 + cfg->quad.tolerance)) {
                         o.failures.push_back("cdf outside [0,1] at S = " + format_real(r.S));
                     }
                     if (!r.r.conclusive) o.failures.push_back("truncation bound above tolerance at S = " + format_real(r.S));
                 }
                 o.summary = {{"experiment", "kernel"}, {"threshold_S", kernel_threshold(*cfg)}, {"failures", o.failures}};
                 return o;
             },
             0});
    }
    {
        auto frame = std::make_shared<FrameParams>(FrameParams{.N = 200, .kappa = 1.0});
        auto model = std::make_shared<std::string>("pp");
        auto u = std::make_shared<double>(0.5);
        add({"geodesic", "geodesic trace of one environment for plotting", "step,i,j",
             {{"N", "system size", &frame->N},
              {"delta", "density offset delta", &frame->delta},
              {"kappa", "density gap kappa", &frame->kappa},
              {"model", "pp, stationary or zero-diagonal", model.get()},
              {"u", "endpoint offset u at level 1", u.get()}},
             [frame, model, u](const RunOptions& r) {
                 const ScalingFrame f(*frame);
                 ModelKind kind = PointToPoint{f.alpha()};
                 if (*model == "stationary") {
                     kind = StationaryRho{f.rho()};
                 } else if (*model == "zero-diagonal") {
                     kind = ZeroDiagonal{f.rho_minus()};
                 } else if (*model != "pp") {
                     throw usage_error("model must be 'pp', 'stationary' or 'zero-diagonal'");
                 }
                 const LatticePoint q = f.q_point(*u, 1.0);
                 const Environment env(EnvironmentSpec{kind, f.N(), replica_seed(r.seed0, 0), 0});
                 const auto g = backtrack(build_table(env, LatticePoint{0, 0}, q), q);
                 Outcome o;
                 std::ostringstream os;
                 write_csv(os, g);
                 o.csv = os.str();
                 o.summary = {{"experiment", "geodesic"}, {"end", {q.i, q.j}}, {"value", g.value},
                              {"touches_diagonal", touches_diagonal(g)}, {"failures", nlohmann::json::array()}};
                 return o;
             },
             0});
    }
    {
        auto cfg = std::make_shared<RandomWalkConfig>();
        add({"rw-bounds", "random-walk and increment-sum tail bounds with explicit constants", kReportColumns,
             {{"N", "system size", &cfg->N},
              {"L", "horizon", &cfg->L},
              {"kappa", "walk density parameter", &cfg->kappa},
              {"xi", "levels", &cfg->xi},
              {"a3_u", "increment-sum length u", &cfg->a3_u},
              {"a3_kappa", "increment-sum density gap", &cfg->a3_kappa},
              {"a3_s", "increment-sum deviations s", &cfg->a3_s},
              {"a3_constant", "prefactor C of the increment-sum bound", &cfg->a3_constant}},
             [cfg](const RunOptions& r) { return from_report(rw_bounds_experiment(*cfg, r)); },
             1000000});
    }
    return cmds;
}

std::string output_path(const std::string& out, const std::string& name)
{
    if (!out.empty()) return out;
    const char* root = std::getenv("LPP_DATA_DIR");
    return (std::filesystem::path(root && *root ? root : ".") / (name + ".csv")).string();
}

void write_file(const std::string& path, const std::string& text)
{
    const auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw usage_error("cannot write " + path);
    f << text;
    if (!f) throw usage_error("write failed: " + path);
}

struct Invocation {
    Command* cmd = nullptr;
    std::string config;
    std::string out;
    std::int64_t replicas = 0;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    std::map<std::string, std::string> flags; // key -> raw text given on the command line
};

std::vector<Param> common_params(Invocation& inv)
{
    return {{"replicas", "number of replicas", &inv.replicas},
            {"seed", "base seed seed0", &inv.seed},
            {"threads", "worker threads (results do not depend on it)", &inv.threads},
            {"out", "CSV path ('-' for stdout); JSON sidecar next to it", &inv.out}};
}

int execute(Invocation& inv)
{
    Command& c = *inv.cmd;
    auto common = common_params(inv);
    std::vector<Param> all = c.params;
    all.insert(all.end(), common.begin(), common.end());
    if (!inv.config.empty()) {
        toml::table probe;
        try {
            probe = toml::parse_file(inv.config);
        } catch (const toml::parse_error&) {
            // load_config reports the position.
        }
        if (auto e = probe["experiment"].value<std::string>(); e && *e != c.name) {
            throw usage_error(inv.config + ": experiment = '" + *e + "' does not match subcommand '" + c.name + "'");
        }
        lpp_cli::load_config(inv.config, all, {"N"}, {"experiment"});
    }
    for (const auto& [key, text] : inv.flags) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const Param& p) { return p.key == key; });
        lpp_cli::assign_text(*it, text);
    }
    if (c.default_replicas > 0 && inv.replicas < 2) throw usage_error("replicas must be at least 2");
    if (inv.threads == 0) inv.threads = 1;

    const RunOptions run{inv.replicas, inv.seed, inv.threads};
    const Outcome o = c.run(run);

    nlohmann::json side = {{"experiment", c.name}, {"config", lpp_cli::echo(all)}, {"summary", o.summary}};
    const std::string path = output_path(inv.out, c.name);
    if (path == "-") {
        std::cout << o.csv;
    } else {
        write_file(path, o.csv);
        write_file(std::filesystem::path(path).replace_extension(".json").string(), side.dump(2) + "\n");
        std::cerr << "wrote " << path << '\n';
    }
    for (const auto& f : o.failures) std::cerr << "violation: " << f << '\n';
    return o.failures.empty() ? kExitOk : kExitViolation;
}

int list_catalog(const std::vector<std::unique_ptr<Command>>& cmds, bool json)
{
    if (json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : cmds) arr.push_back({{"name", c->name}, {"anchors", {c->anchor}}});
        std::cout << arr.dump(2) << '\n';
        return kExitOk;
    }
    for (const auto& c : cmds) std::cout << c->name << " (" << c->anchor << ")\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    auto cmds = make_commands();
    std::vector<std::string> names{"list", "run"};
    for (const auto& c : cmds) names.push_back(c->name);

    if (argc >= 2 && argv[1][0] != '-' && std::find(names.begin(), names.end(), argv[1]) == names.end()) {
        std::cerr << "lpp: unknown subcommand '" << argv[1] << "'; did you mean '" << lpp_cli::nearest(argv[1], names)
                  << "'?\n";
        return kExitUsage;
    }

    CLI::App app{"Half-space last passage percolation experiments and Fredholm Pfaffian numerics"};
    app.require_subcommand(1);
    bool list_json = false;
    auto* list = app.add_subcommand("list", "print the experiment catalog");
    list->add_flag("--json", list_json, "machine-readable catalog");

    std::string run_config;
    auto* run = app.add_subcommand("run", "run the experiment named by the config's 'experiment' key");
    run->add_option("--config,config", run_config, "TOML config")->required();
    std::map<std::string, std::string> run_raw;
    for (const char* key : {"replicas", "seed", "threads", "out"}) {
        run->add_option(lpp_cli::flag_name(key), run_raw[key], "overrides the config value");
    }

    Invocation inv;
    std::vector<std::pair<CLI::App*, Command*>> subs;
    std::map<std::string, std::string> raw;
    for (auto& c : cmds) {
        auto* sub = app.add_subcommand(c->name, c->anchor);
        sub->footer("CSV columns: " + c->csv_columns);
        sub->add_option("--config", inv.config, "TOML config; flags override its keys");
        std::vector<Param> all = c->params;
        for (const auto& p : common_params(inv)) all.push_back(p);
        for (const auto& p : all) {
            std::string names_ = lpp_cli::flag_name(p.key);
            if (p.key == "N") names_ += ",--n";
            sub->add_option(names_, raw[c->name + "/" + p.key], p.help);
        }
        subs.emplace_back(sub, c.get());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (list->parsed()) return list_catalog(cmds, list_json);
        if (run->parsed()) {
            toml::table t;
            try {
                t = toml::parse_file(run_config);
            } catch (const toml::parse_error& e) {
                std::ostringstream os;
                os << run_config << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
                   << e.description();
                throw usage_error(os.str());
            }
            const auto name = t["experiment"].value<std::string>();
            if (!name) throw usage_error("missing field: experiment");
            for (auto& c : cmds) {
                if (c->name == *name) inv.cmd = c.get();
            }
            if (!inv.cmd) {
                throw usage_error("unknown experiment '" + *name + "'; did you mean '" + lpp_cli::nearest(*name, names) + "'?");
            }
            inv.config = run_config;
            for (const auto& [key, text] : run_raw) {
                if (run->get_option(lpp_cli::flag_name(key))->count() > 0) inv.flags[key] = text;
            }
        } else {
            for (auto& [sub, c] : subs) {
                if (!sub->parsed()) continue;
                inv.cmd = c;
                std::vector<Param> all = c->params;
                for (const auto& p : common_params(inv)) all.push_back(p);
                for (const auto& p : all) {
                    auto* opt = sub->get_option(lpp_cli::flag_name(p.key));
                    if (opt->count() > 0) inv.flags[p.key] = raw[c->name + "/" + p.key];
                }
            }
        }
        inv.replicas = inv.cmd->default_replicas;
        return execute(inv);
    } catch (const usage_error& e) {
        std::cerr << "lpp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const hslpp::domain_error& e) {
        std::cerr << "lpp: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "lpp: " << e.what() << '\n';
        return kExitUsage;
    }
}
