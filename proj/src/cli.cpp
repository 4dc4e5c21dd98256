#include "rbsn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "rbsn/errors.hpp"
#include "rbsn/geometry.hpp"
#include "rbsn/homogenize.hpp"
#include "rbsn/io.hpp"
#include "rbsn/log.hpp"
#include "rbsn/report.hpp"
#include "rbsn/solver.hpp"
#include "rbsn/theory.hpp"

namespace rbsn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options
{
    // global
    std::uint64_t seed = 1;
    int threads = 0;
    bool quiet = false;
    bool no_clobber = false;
    std::string config;

    // generate
    std::string kind;
    std::vector<double> size{50.0, 50.0};
    double l_min = 1.0;
    int max_trials = 10000;

    // shared file arguments
    std::vector<std::string> inputs;
    std::string out;
    std::string csv;
    std::string svg;

    // stats
    int bins = 80;

    // predict
    std::string mode = "ps";
    std::string alpha = "0";
    std::optional<double> gamma;
    std::optional<double> i1;
    std::optional<double> i2;
    std::string table;

    // curves
    int figure = 0;
    std::string gammas = "0";
    std::string alphas;

    // simulate / sweep
    double e0 = 1.0;
    double p = 1e-3;
    double q = 0.0;
    bool plane_strain = false;
    double margin = 3.0;
    bool states = false;
    bool cg = false;
    std::string kinds;

    // verify-expectations
    int dim = 2;
    std::string gamma_grid = "0.1:3.0:30";
    std::int64_t samples = 1000000;
    double sigma = 3.0;
    double vol_tol = 5e-3;
};

std::string fixed(double v, int prec = 6)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

double parse_number(const std::string& s, const std::string& what)
{
    if (s == "inf" || s == "infinity")
        return INFINITY;
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty())
        throw ConfigError("invalid number '" + s + "' for " + what);
    return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        v.push_back(parse_number(item, what));
    if (v.empty())
        throw ConfigError("empty list for " + what);
    return v;
}

std::vector<double> parse_grid(const std::string& s)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':'))
        parts.push_back(item);
    if (parts.size() != 3)
        throw ConfigError("grid must be given as a:b:n, got '" + s + "'");
    const double a = parse_number(parts[0], "grid start"), b = parse_number(parts[1], "grid end");
    const double n = parse_number(parts[2], "grid count");
    if (n < 1 || n != std::floor(n))
        throw ConfigError("grid count must be a positive integer");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = g.size() == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(g.size() - 1);
    return g;
}

/// Translates a JSON object into command-line tokens for the given
/// subcommand, rejecting keys that are not options of it or of the root.
std::vector<std::string> config_tokens(const json& cfg, const CLI::App& root, const CLI::App* sub)
{
    if (!cfg.is_object())
        throw ConfigError("config file must hold a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        const bool known = key != "config" && key != "help"
                           && ((sub && sub->get_option_no_throw(flag)) || root.get_option_no_throw(flag));
        if (!known)
            throw ConfigError("unknown config key '" + key + "'");
        auto scalar = [&](const json& v) -> std::string {
            if (v.is_string())
                return v.get<std::string>();
            if (v.is_number_integer())
                return v.dump();
            if (v.is_number())
                return format_double(v.get<double>());
            throw ConfigError("config key '" + key + "' has an unsupported value " + v.dump());
        };
        if (value.is_boolean()) {
            if (value.get<bool>())
                tokens.push_back(flag);
        } else if (value.is_array()) {
            tokens.push_back(flag);
            for (const auto& v : value)
                tokens.push_back(scalar(v));
        } else {
            tokens.push_back(flag);
            tokens.push_back(scalar(value));
        }
    }
    return tokens;
}

class Outputs
{
public:
    explicit Outputs(bool no_clobber) : no_clobber_(no_clobber) {}

    /// Registers an optional output path and checks it can be written.
    void add(const std::string& path)
    {
        if (path.empty())
            return;
        if (no_clobber_ && fs::exists(path))
            throw IoError("refusing to overwrite existing " + path);
        check_writable(path);
    }

private:
    bool no_clobber_;
};

class WarningGuard
{
public:
    explicit WarningGuard(WarningHandler h) : previous_(set_warning_handler(std::move(h))) {}
    ~WarningGuard() { set_warning_handler(std::move(previous_)); }
    WarningGuard(const WarningGuard&) = delete;
    WarningGuard& operator=(const WarningGuard&) = delete;

private:
    WarningHandler previous_;
};

int thread_count(int requested)
{
    if (requested > 0)
        return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------------------

int cmd_generate(const Options& o, std::ostream& out)
{
    const auto kind = tessellation_kind_from_string(o.kind);
    if (o.size.size() != 2 || !(o.size[0] > 0 && o.size[1] > 0))
        throw ConfigError("--size needs two positive values");
    if (!(o.l_min > 0))
        throw ConfigError("--lmin must be positive");
    Outputs outputs(o.no_clobber);
    outputs.add(o.out);
    Tessellation t;
    try {
        t = generate(kind, o.size[0], o.size[1], o.l_min, o.seed, o.max_trials);
    } catch (const std::invalid_argument& e) {
        throw GenerationError(e.what());
    }
    save_tessellation(t, o.out);
    if (!o.quiet) {
        const auto s = chi_statistics(t.contacts);
        out << "kind=" << to_string(t.kind) << " nodes=" << t.nodes.size() << " contacts=" << t.contacts.size()
            << " I1=" << fixed(s.i1) << " I2=" << fixed(s.i2) << "\n";
    }
    return ok;
}

int cmd_stats(const Options& o, std::ostream& out)
{
    if (o.bins < 1)
        throw ConfigError("--bins must be positive");
    Outputs outputs(o.no_clobber);
    outputs.add(o.csv);
    outputs.add(o.svg);
    const auto t = load_tessellation(o.inputs.at(0));
    const auto s = chi_statistics(t.contacts, o.bins);
    if (!o.csv.empty()) {
        CsvTable table({"chi_lo", "chi_hi", "density"});
        for (std::size_t i = 0; i < s.density.size(); ++i)
            table.add_row({format_double(s.bin_edges[i]), format_double(s.bin_edges[i + 1]),
                           format_double(s.density[i])});
        write_file_atomic(o.csv, table.str());
    }
    if (!o.svg.empty()) {
        Series hist{to_string(t.kind), {}, {}};
        for (std::size_t i = 0; i < s.density.size(); ++i) {
            hist.x.push_back(0.5 * (s.bin_edges[i] + s.bin_edges[i + 1]));
            hist.y.push_back(s.density[i]);
        }
        write_file_atomic(o.svg, emit_svg({Panel{"Contact angle density", "chi [rad]", "f(chi) [1/rad]", {hist}}}));
    }
    if (!o.quiet)
        out << "contacts=" << s.sample_count << " I1=" << fixed(s.i1) << " I2=" << fixed(s.i2) << "\n";
    return ok;
}

int cmd_predict(const Options& o, std::ostream& out)
{
    const auto mode = analysis_mode_from_string(o.mode);
    const double alpha = parse_number(o.alpha, "--alpha");
    if (o.gamma && (o.i1 || o.i2))
        throw ConfigError("give either --gamma or --i1/--i2, not both");
    if (o.i1.has_value() != o.i2.has_value())
        throw ConfigError("--i1 and --i2 must be given together");
    Outputs outputs(o.no_clobber);
    outputs.add(o.table);

    auto at = [&](double a) {
        if (o.i1)
            return predict_general(a, *o.i1, *o.i2, mode);
        return predict_cone(a, o.gamma.value_or(0.0), mode);
    };
    const auto c = at(alpha);
    if (!o.table.empty()) {
        CsvTable table({"alpha", "nu", "E_over_E0"});
        for (int i = 0; i <= 60; ++i) {
            const double a = 0.05 * i;
            const auto r = at(a);
            table.add_row({format_double(a), format_double(r.nu), format_double(r.e)});
        }
        const auto r = at(INFINITY);
        table.add_row({"inf", format_double(r.nu), format_double(r.e)});
        write_file_atomic(o.table, table.str());
    }
    const auto range = o.i2 ? nu_interval(mode, *o.i2) : nu_interval_cone(mode, o.gamma.value_or(0.0));
    out << "nu=" << fixed(c.nu) << " E/E0=" << fixed(c.e) << "\n";
    if (!o.quiet)
        out << "nu range over alpha in [0, inf): [" << fixed(range.lo) << ", " << fixed(range.hi) << "]\n";
    return ok;
}

int cmd_curves(const Options& o, std::ostream& out)
{
    Outputs outputs(o.no_clobber);
    outputs.add(o.svg);
    outputs.add(o.csv);
    const auto alphas = parse_list(o.alphas.empty() ? "0,0.25,0.5,1,2,3" : o.alphas, "--alphas");
    std::vector<Panel> panels;
    switch (o.figure) {
    case 2: panels = figure_alpha_curves(parse_list(o.gammas, "--gammas")); break;
    case 3: panels = figure_gamma_curves(alphas); break;
    case 4: panels = figure_i2_curves(alphas); break;
    default: throw ConfigError("--figure must be 2, 3 or 4");
    }
    if (!o.svg.empty())
        write_file_atomic(o.svg, emit_svg(panels));
    if (!o.csv.empty())
        write_file_atomic(o.csv, panels_csv(panels).str());
    if (!o.quiet) {
        std::size_t curves = 0;
        for (const auto& p : panels)
            curves += p.series.size();
        out << "figure " << o.figure << ": " << panels.size() << " panels, " << curves << " curves\n";
    }
    return ok;
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

json matrix_json(const Eigen::Matrix2d& m)
{
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_simulate(const Options& o, std::ostream& out)
{
    const MaterialParams params{o.e0, parse_number(o.alpha, "--alpha")};
    params.validate();
    if (!std::isfinite(params.alpha))
        throw ConfigError("--alpha must be finite for a simulation");
    const auto mode = o.plane_strain ? AnalysisMode::PlaneStrain : AnalysisMode::PlaneStress;
    Outputs outputs(o.no_clobber);
    outputs.add(o.out);
    const auto t = load_tessellation(o.inputs.at(0));

    SolveOptions solver;
    solver.method = o.cg ? LinearSolver::ConjugateGradient : LinearSolver::Cholesky;
    const auto load = StrainLoad::uniaxial(o.p, o.q);
    const auto sim = simulate(t, params, load, solver, thread_count(o.threads));
    const auto macro = bagi_stress(t, sim.states, o.margin * t.l_min);
    const auto fitted = strain_from_regression(t, sim.dofs, sim.boundary);
    const auto c = extract_constants(macro.sigma, load.eps, mode);
    const auto stats = chi_statistics(t.contacts);
    const auto pred = predict_general(params.alpha, stats.i1, stats.i2, mode, params.e0);

    json j;
    j["dofs"] = std::vector<double>(sim.dofs.data(), sim.dofs.data() + sim.dofs.size());
    if (o.states) {
        j["states"] = json::array();
        for (const auto& s : sim.states)
            j["states"].push_back({{"delta", vec_json(s.delta)},
                                   {"e_n", s.e_n},
                                   {"e_t", vec_json(s.e_t)},
                                   {"s_n", s.s_n},
                                   {"s_t", vec_json(s.s_t)},
                                   {"f", vec_json(s.force)}});
    }
    j["residuals"] = {{"force", sim.residual.force}, {"moment", sim.residual.moment}};
    j["macro"] = {{"mode", to_string(mode)},
                  {"e0", params.e0},
                  {"alpha", params.alpha},
                  {"sigma", matrix_json(macro.sigma)},
                  {"eps", matrix_json(load.eps)},
                  {"eps_regression", matrix_json(fitted)},
                  {"margin", macro.margin},
                  {"v_inner", macro.v_inner},
                  {"inner_contacts", macro.contacts},
                  {"nu", finite_or_null(c.nu)},
                  {"E", finite_or_null(c.e)},
                  {"nu_predicted", finite_or_null(pred.nu)},
                  {"E_predicted", finite_or_null(pred.e)},
                  {"I1", stats.i1},
                  {"I2", stats.i2}};
    write_file_atomic(o.out, j.dump() + "\n");
    if (!o.quiet)
        out << "nu=" << fixed(c.nu) << " E/E0=" << fixed(c.e / params.e0) << " predicted nu=" << fixed(pred.nu)
            << " E/E0=" << fixed(pred.e / params.e0) << " residual force=" << sim.residual.force
            << " moment=" << sim.residual.moment << "\n";
    return ok;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err)
{
    const auto mode = analysis_mode_from_string(o.mode);
    if (mode == AnalysisMode::ThreeD)
        throw ConfigError("sweeps are two-dimensional; use --mode ps or pe");
    const auto alphas = parse_list(o.alphas.empty() ? "0.1,0.25,0.5,1,2,3" : o.alphas, "--alphas");
    if (o.inputs.empty() == o.kinds.empty())
        throw ConfigError("give either --in files or --kinds");
    Outputs outputs(o.no_clobber);
    outputs.add(o.csv);
    outputs.add(o.svg);

    std::vector<Tessellation> structures;
    for (const auto& path : o.inputs)
        structures.push_back(load_tessellation(path));
    if (!o.kinds.empty()) {
        if (o.size.size() != 2)
            throw ConfigError("--size needs two values");
        std::stringstream ss(o.kinds);
        std::string k;
        std::vector<TessellationKind> kinds;
        while (std::getline(ss, k, ','))
            kinds.push_back(tessellation_kind_from_string(k));
        for (auto kind : kinds) {
            try {
                structures.push_back(generate(kind, o.size[0], o.size[1], o.l_min, o.seed, o.max_trials));
            } catch (const std::invalid_argument& e) {
                throw GenerationError(e.what());
            }
        }
    }

    SweepOptions sw;
    sw.e0 = o.e0;
    sw.mode = mode;
    sw.p = o.p;
    sw.q = o.q;
    sw.margin = o.margin;
    sw.solver.method = o.cg ? LinearSolver::ConjugateGradient : LinearSolver::Cholesky;
    sw.threads = thread_count(o.threads);
    std::vector<SweepRow> rows;
    bool failed = false;
    for (const auto& t : structures) {
        for (auto& r : alpha_sweep(t, alphas, sw)) {
            if (!r.error.empty()) {
                failed = true;
                err << "error: " << to_string(r.kind) << " alpha=" << r.alpha << ": " << r.error << "\n";
            }
            rows.push_back(std::move(r));
        }
    }
    if (!o.csv.empty())
        write_file_atomic(o.csv, sweep_csv(rows).str());
    if (!o.svg.empty())
        write_file_atomic(o.svg, emit_svg(sweep_panels(rows)));
    if (!o.quiet) {
        out << "kind alpha nu_num E_num nu_pred E_pred\n";
        for (const auto& r : rows)
            out << to_string(r.kind) << " " << r.alpha << " " << fixed(r.nu_numeric) << " " << fixed(r.e_numeric) << " "
                << fixed(r.nu_predicted) << " " << fixed(r.e_predicted) << "\n";
    }
    return failed ? solver_error : ok;
}

int cmd_verify(const Options& o, std::ostream& out)
{
    if (o.dim != 2 && o.dim != 3)
        throw ConfigError("--dim must be 2 or 3");
    if (o.samples < 1)
        throw ConfigError("--samples must be positive");
    const auto grid = parse_grid(o.gamma_grid);
    Outputs outputs(o.no_clobber);
    outputs.add(o.csv);
    CsvTable table({"gamma", "max_z", "volume_diff", "status"});
    bool all = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = check_expectations(grid[i], o.dim, o.samples, o.seed + i, o.sigma, o.vol_tol,
                                          thread_count(o.threads));
        all = all && c.pass;
        const char* status = c.pass ? "PASS" : "FAIL";
        table.add_row({format_double(c.gamma), format_double(c.max_z), format_double(c.volume_diff), status});
        if (!o.quiet || !c.pass)
            out << "gamma=" << fixed(c.gamma, 4) << " max_z=" << fixed(c.max_z, 3)
                << " volume_diff=" << fixed(c.volume_diff, 6) << " " << status << "\n";
    }
    if (!o.csv.empty())
        write_file_atomic(o.csv, table.str());
    return all ? ok : verification_failed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Rigid-body-spring network elasticity: tessellations, analytic predictors and simulations.\n"
                 "Lengths are in the units of --lmin, stresses in the units of --e0; strains, ratios and "
                 "alpha are dimensionless; angles are in radians.",
                 "rbsn"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 1 invalid configuration, 2 generation failure, 3 solver failure, "
               "4 I/O failure, 5 verification failure.");
    // Global options are accepted before or after the subcommand and listed
    // in every subcommand's help.
    auto add_globals = [&o](CLI::App* a) {
        a->add_option("--seed", o.seed, "Random seed [-]")->capture_default_str();
        a->add_option("--threads", o.threads, "Worker threads, 0 = all cores [-]")->capture_default_str();
        a->add_flag("--quiet", o.quiet, "Suppress progress output and warnings");
        a->add_flag("--no-clobber", o.no_clobber, "Refuse to overwrite existing output files");
        a->add_option("--config", o.config, "JSON file with option values; command-line flags take precedence");
    };
    add_globals(&app);

    auto* gen = app.add_subcommand("generate", "Generate a tessellation and write it as JSON");
    gen->add_option("--kind", o.kind, "voronoi | rand-voronoi | random | centered")->required();
    gen->add_option("--size", o.size, "Domain width and height [l_min]")->expected(2)->capture_default_str();
    gen->add_option("--lmin", o.l_min, "Minimum node spacing [length]")->capture_default_str();
    gen->add_option("--max-trials", o.max_trials, "Consecutive rejections ending point placement [-]")
        ->capture_default_str();
    gen->add_option("--out", o.out, "Output tessellation JSON")->required();

    auto* stats = app.add_subcommand("stats", "Contact-angle statistics of a tessellation");
    stats->add_option("--in", o.inputs, "Tessellation JSON")->required()->expected(1);
    stats->add_option("--bins", o.bins, "Histogram bins over [-pi, pi] [-]")->capture_default_str();
    stats->add_option("--csv", o.csv, "Histogram CSV output");
    stats->add_option("--svg", o.svg, "Histogram SVG output");

    auto* predict = app.add_subcommand("predict", "Analytic Poisson's ratio and elastic modulus");
    predict->add_option("--mode", o.mode, "ps | pe | 3d")->capture_default_str();
    predict->add_option("--alpha", o.alpha, "Tangential/normal stiffness ratio, or inf [-]")->capture_default_str();
    predict->add_option("--gamma", o.gamma, "Cone half-angle of the contact-angle distribution [rad], default 0");
    predict->add_option("--i1", o.i1, "E[cos chi] of an arbitrary distribution [-]");
    predict->add_option("--i2", o.i2, "E[cos 2chi] of an arbitrary distribution [-]");
    predict->add_option("--table", o.table, "CSV of nu and E/E0 over alpha in [0, 3] plus alpha = inf");

    auto* curves = app.add_subcommand("curves", "Analytic curves as SVG line plots and CSV");
    curves->add_option("--figure", o.figure, "2: nu, E/E0 vs alpha; 3: nu vs gamma; 4: nu vs I2")->required();
    curves->add_option("--svg", o.svg, "SVG output");
    curves->add_option("--csv", o.csv, "CSV output (panel, series, x, y)");
    curves->add_option("--gammas", o.gammas, "Comma-separated cone angles for figure 2 [rad]")->capture_default_str();
    curves->add_option("--alphas", o.alphas, "Comma-separated alpha values for figures 3 and 4 [-]");

    auto* sim = app.add_subcommand("simulate", "Solve a tessellation under a prescribed boundary strain");
    sim->add_option("--in", o.inputs, "Tessellation JSON")->required()->expected(1);
    sim->add_option("--e0", o.e0, "Normal contact stiffness E0 [stress]")->capture_default_str();
    sim->add_option("--alpha", o.alpha, "Tangential/normal stiffness ratio [-]")->required();
    sim->add_option("--p", o.p, "Imposed strain eps11 [-]")->capture_default_str();
    sim->add_option("--q", o.q, "Imposed strain eps22 [-]")->capture_default_str();
    sim->add_flag("--plane-strain", o.plane_strain, "Extract constants for plane strain instead of plane stress");
    sim->add_option("--margin", o.margin, "Stress window inset from the boundary [l_min]")->capture_default_str();
    sim->add_flag("--states", o.states, "Include per-contact states in the output");
    sim->add_flag("--cg", o.cg, "Use conjugate gradients instead of sparse Cholesky");
    sim->add_option("--out", o.out, "Result JSON")->required();

    auto* sweep = app.add_subcommand("sweep", "Numeric and predicted constants over a list of alpha values");
    sweep->add_option("--in", o.inputs, "Tessellation JSON files")->expected(1, 64)->multi_option_policy(
        CLI::MultiOptionPolicy::TakeAll);
    sweep->add_option("--kinds", o.kinds, "Comma-separated kinds to generate instead of --in");
    sweep->add_option("--size", o.size, "Domain size for --kinds [l_min]")->expected(2)->capture_default_str();
    sweep->add_option("--lmin", o.l_min, "Minimum node spacing for --kinds [length]")->capture_default_str();
    sweep->add_option("--max-trials", o.max_trials, "Point placement rejections for --kinds [-]")
        ->capture_default_str();
    sweep->add_option("--alphas", o.alphas, "Comma-separated alpha values [-], default 0.1,0.25,0.5,1,2,3");
    sweep->add_option("--e0", o.e0, "Normal contact stiffness E0 [stress]")->capture_default_str();
    sweep->add_option("--mode", o.mode, "ps | pe")->capture_default_str();
    sweep->add_option("--p", o.p, "Imposed strain eps11 [-]")->capture_default_str();
    sweep->add_option("--q", o.q, "Imposed strain eps22 [-]")->capture_default_str();
    sweep->add_option("--margin", o.margin, "Stress window inset from the boundary [l_min]")->capture_default_str();
    sweep->add_flag("--cg", o.cg, "Use conjugate gradients instead of sparse Cholesky");
    sweep->add_option("--csv", o.csv, "CSV output");
    sweep->add_option("--svg", o.svg, "SVG output");

    auto* verify = app.add_subcommand("verify-expectations", "Compare closed-form expectations with Monte Carlo");
    verify->add_option("--dim", o.dim, "2 or 3")->capture_default_str();
    verify->add_option("--gamma-grid", o.gamma_grid, "Cone angles as start:end:count [rad]")->capture_default_str();
    verify->add_option("--samples", o.samples, "Monte Carlo samples per angle [-]")->capture_default_str();
    verify->add_option("--sigma", o.sigma, "Allowed deviation in standard errors [-]")->capture_default_str();
    verify->add_option("--vol-tol", o.vol_tol, "Allowed absolute error of E[rho:nu] [-]")->capture_default_str();
    verify->add_option("--csv", o.csv, "CSV output");

    for (auto* s : app.get_subcommands({}))
        add_globals(s);

    int stage_code = config_error;
    try {
        std::vector<std::string> tokens = args;
        // Locate --config and the subcommand before the real parse.
        std::string config_path;
        std::size_t sub_pos = tokens.size();
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i] == "--config" && i + 1 < tokens.size())
                config_path = tokens[i + 1];
            else if (tokens[i].rfind("--config=", 0) == 0)
                config_path = tokens[i].substr(9);
            else if (sub_pos == tokens.size() && app.get_subcommand_no_throw(tokens[i]) != nullptr)
                sub_pos = i;
        }
        if (!config_path.empty() && sub_pos < tokens.size()) {
            json cfg;
            try {
                cfg = json::parse(read_file(config_path));
            } catch (const json::parse_error& e) {
                throw ConfigError("malformed config file: " + std::string(e.what()));
            }
            const auto extra = config_tokens(cfg, app, app.get_subcommand(tokens[sub_pos]));
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, extra.begin(), extra.end());
        }
        std::reverse(tokens.begin(), tokens.end());
        try {
            app.parse(tokens);
        } catch (const CLI::CallForHelp&) {
            out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
            return ok;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return ok;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << "\n";
            return config_error;
        }

        const WarningGuard guard(o.quiet ? WarningHandler{}
                                         : [&err](const std::string& m) { err << "warning: " << m << "\n"; });

        const auto* active = app.get_subcommands().front();
        const std::string name = active->get_name();
        if (name == "generate")
            stage_code = generation_error;
        else if (name == "simulate" || name == "sweep")
            stage_code = solver_error;
        int code = ok;
        if (name == "generate")
            code = cmd_generate(o, out);
        else if (name == "stats")
            code = cmd_stats(o, out);
        else if (name == "predict")
            code = cmd_predict(o, out);
        else if (name == "curves")
            code = cmd_curves(o, out);
        else if (name == "simulate")
            code = cmd_simulate(o, out);
        else if (name == "sweep")
            code = cmd_sweep(o, out, err);
        else
            code = cmd_verify(o, out);
        return code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return io_error;
    } catch (const GenerationError& e) {
        err << "error: generation failed: " << e.what() << "\n";
        return generation_error;
    } catch (const SolverError& e) {
        err << "error: solver failed: " << e.what() << "\n";
        return solver_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return stage_code;
    }
}

}  // namespace rbsn::cli
