#include "qgnls/cli.hpp"

#include "qgnls/closed_forms.hpp"
#include "qgnls/format.hpp"
#include "qgnls/metric_graph.hpp"
#include "qgnls/minimize.hpp"
#include "qgnls/surgery.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qgnls::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kExitError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string graph_path;
    std::optional<double> g_ell;
    double mass = 1.0;
    double p = kDefaultPower;
    double h_max = 0.0;
    double l_inf = 0.0;
    double tol_grad = 1e-8;
    double tol_level = 0.0;
    int max_iters = 2000;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string format = "text";

    std::string kind = "auto";
    std::optional<double> ell;
    std::optional<double> ell_new;
    double width = 0.0;
    std::vector<double> ells;
};

/// Ordered key-value block, printed as `key: value` or as two-column CSV.
class Report {
public:
    void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double x) { add(std::move(key), fmt_num(x)); }
    void add(std::string key, int x) { add(std::move(key), std::to_string(x)); }
    void add(std::string key, std::size_t x) { add(std::move(key), std::to_string(x)); }
    void add(std::string key, bool b) { add(std::move(key), std::string(b ? "true" : "false")); }
    void add(std::string key, const char* s) { add(std::move(key), std::string(s)); }
    void add(std::string key, std::string_view s) { add(std::move(key), std::string(s)); }

    void write(std::ostream& os, const std::string& format) const {
        if (format == "csv") {
            os << "key,value\n";
            for (const auto& [k, v] : rows_) os << k << ',' << v << '\n';
        } else {
            for (const auto& [k, v] : rows_) os << k << ": " << v << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

void require_mass_and_power(const Options& o) {
    if (!(o.mass > 0.0)) throw UsageError("--mass must be positive");
    if (!(o.p > 2.0 && o.p < 6.0)) throw UsageError("--p must lie in (2, 6)");
}

struct LoadedGraph {
    MetricGraph graph;
    std::string label;
};

LoadedGraph load(const Options& o) {
    if (o.g_ell && !o.graph_path.empty()) throw UsageError("--graph and --g-ell are mutually exclusive");
    if (o.g_ell) {
        if (!(*o.g_ell > 0.0)) throw UsageError("--g-ell must be positive");
        return {graphs::g_ell(*o.g_ell), "g_ell(" + fmt_num(*o.g_ell) + ")"};
    }
    if (o.graph_path.empty()) throw UsageError("a graph is required (--graph FILE or --g-ell LENGTH)");
    MetricGraph g = load_graph(o.graph_path);
    const auto violations = validate(g);
    if (!violations.empty())
        throw GraphError("invalid graph: " + std::string(to_string(violations.front().rule)) + ": " +
                         violations.front().detail);
    return {std::move(g), fs::path(o.graph_path).filename().string()};
}

SolveOptions solve_options(const Options& o) {
    SolveOptions s;
    s.p = o.p;
    s.h_max = o.h_max;
    s.truncation = o.l_inf;
    s.tol_grad = o.tol_grad;
    s.tol_level = o.tol_level;
    s.max_iters = o.max_iters;
    s.seed = o.seed;
    return s;
}

fs::path out_dir(const Options& o) {
    fs::path dir = o.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("QGNLS_OUT_DIR");
        dir = env && *env ? env : ".";
    }
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    return f;
}

void write_report(const Report& r, const Options& o, const fs::path& stem) {
    r.write(std::cout, o.format);
    const fs::path path = out_dir(o) / (stem.string() + (o.format == "csv" ? ".csv" : ".txt"));
    std::ofstream f = open_out(path);
    r.write(f, o.format);
}

void write_profile(const GraphFunction& u, const Options& o, const std::string& name) {
    std::ofstream f = open_out(out_dir(o) / name);
    write_profile_csv(f, u);
}

void add_solve_header(Report& r, const std::string& label, const Options& o, const SolveOptions& s) {
    r.add("graph", label);
    r.add("mass", o.mass);
    r.add("p", s.p);
    r.add("h_max", s.h_max);
    r.add("l_inf", s.truncation);
    r.add("tol_grad", s.tol_grad);
    r.add("tol_level", s.tol_level);
    r.add("max_iters", s.max_iters);
    r.add("seed", std::to_string(s.seed));
}

// ---------------------------------------------------------------------------

int cmd_check(const Options& o) {
    const LoadedGraph lg = load(o);
    const MetricGraph& g = lg.graph;
    Report r;
    r.add("graph", lg.label);
    r.add("vertices", g.num_vertices());
    r.add("edges", g.num_edges());
    r.add("halflines", g.num_halflines());
    r.add("valid", true);
    const AssumptionH h = check_assumption_h(g);
    r.add("assumption_h", h.holds);
    r.add("assumption_h_trails", check_assumption_h_trails(g));
    r.add("assumption_h_witness", h.witness ? std::to_string(h.witness->index) : std::string("none"));
    const auto tower = match_bubble_tower(g);
    r.add("bubble_tower", tower.has_value());
    if (tower) r.add("bubble_tower_cycles", tower->arcs.size() + (tower->top_loop > 0.0 ? 1 : 0));
    r.write(std::cout, o.format);
    return 0;
}

int cmd_levels(const Options& o) {
    require_mass_and_power(o);
    const LevelKind kinds[] = {LevelKind::line, LevelKind::halfline, LevelKind::star3_stationary};
    if (o.format == "csv") {
        std::cout << "kind,mass,p,value\n";
        for (LevelKind k : kinds)
            std::cout << to_string(k) << ',' << fmt_num(o.mass) << ',' << fmt_num(o.p) << ','
                      << fmt_num(level(k, o.mass, o.p).value) << '\n';
    } else {
        std::cout << "kind              mass          p     value\n";
        for (LevelKind k : kinds) {
            std::string row = std::string(to_string(k));
            row.resize(18, ' ');
            std::string m = fmt_num(o.mass);
            m.resize(14, ' ');
            std::string pp = fmt_num(o.p);
            pp.resize(6, ' ');
            std::cout << row << m << pp << fmt_num(level(k, o.mass, o.p).value) << '\n';
        }
    }
    return 0;
}

int cmd_minimize(const Options& o) {
    require_mass_and_power(o);
    const LoadedGraph lg = load(o);
    const SolveOptions s = solve_options(o).resolved(o.mass);
    const MinimizeResult m = minimize(lg.graph, o.mass, s);

    Report r;
    add_solve_header(r, lg.label, o, s);
    r.add("nodes", m.best.size());
    r.add("best_start", m.best_start);
    r.add("any_converged", m.any_converged);
    r.add("energy", m.best_report.total);
    r.add("kinetic", m.best_report.kinetic);
    r.add("potential", m.best_report.potential);
    r.add("mass_final", m.best_report.mass);
    r.add("omega", m.best_report.omega);
    r.add("kirchhoff_residual", m.best_report.kirchhoff_residual);
    r.add("boundary_mass_fraction", m.boundary_mass_fraction);
    const double lvl = line_level(o.mass, s.p);
    r.add("line_level", lvl);
    r.add("gap", m.best_report.total - lvl);
    r.add("gn_constant", m.gn_constant);
    for (const StartRecord& st : m.starts) {
        const std::string k = "start." + st.name + ".";
        r.add(k + "energy", st.energy);
        r.add(k + "grad_norm", st.grad_norm);
        r.add(k + "iterations", st.iterations);
        r.add(k + "converged", st.converged);
        r.add(k + "monotone", st.monotone);
        r.add(k + "gn_bound_ok", st.gn_bound_ok);
    }
    write_report(r, o, "minimize_report");
    write_profile(m.best, o, "profile.csv");
    return 0;
}

int cmd_classify(const Options& o) {
    require_mass_and_power(o);
    const LoadedGraph lg = load(o);
    const SolveOptions s = solve_options(o).resolved(o.mass);
    const ExistenceVerdict v = classify_existence(lg.graph, o.mass, s);

    Report r;
    add_solve_header(r, lg.label, o, s);
    r.add("status", to_string(v.status));
    r.add("level", v.level);
    r.add("best_energy", v.best_energy);
    r.add("gap", v.gap);
    r.add("delta", v.delta);
    r.add("energy_doubled", v.energy_doubled);
    r.add("boundary_mass_fraction", v.boundary_mass_fraction);
    r.add("structural_override", v.structural_override);
    r.add("assumption_h", check_assumption_h(lg.graph).holds);
    r.add("assumption_h_trails", check_assumption_h_trails(lg.graph));
    r.add("bubble_tower", is_bubble_tower(lg.graph));
    r.add("certificate", v.certificate ? std::string("certificate.csv") : std::string("none"));
    write_report(r, o, "classify_report");
    if (v.certificate) write_profile(*v.certificate, o, "certificate.csv");
    switch (v.status) {
        case ExistenceStatus::exists: return 0;
        case ExistenceStatus::likely_nonexistent: return 1;
        case ExistenceStatus::inconclusive: return 2;
    }
    return 2;
}

/// Pendant length when g is a line with one pendant edge at a degree-3 vertex.
std::optional<double> line_pendant_length(const MetricGraph& g) {
    if (g.num_edges() != 3 || g.num_halflines() != 2) return std::nullopt;
    for (const Edge& e : g.edges()) {
        if (e.is_halfline() || e.is_loop()) continue;
        const bool tip_at_to = g.degree(e.to) == 1 && g.degree(e.from) == 3;
        const bool tip_at_from = g.degree(e.from) == 1 && g.degree(e.to) == 3;
        if (!tip_at_to && !tip_at_from) return std::nullopt;
        const VertexId base = tip_at_to ? e.from : e.to;
        for (const Edge& h : g.edges())
            if (h.is_halfline() && h.from != base) return std::nullopt;
        return e.length;
    }
    return std::nullopt;
}

int cmd_competitor(const Options& o) {
    require_mass_and_power(o);
    if (o.p != kDefaultPower) throw UsageError("competitor constructions are implemented for p = 4");
    std::string kind = o.kind;
    std::optional<double> ell = o.ell;
    std::string label = "none";
    if (!o.graph_path.empty() || o.g_ell) {
        const LoadedGraph lg = load(o);
        label = lg.label;
        const auto pend = line_pendant_length(lg.graph);
        std::optional<double> gl;
        try {
            gl = pendant_length(lg.graph);
        } catch (const GraphError&) {
        }
        if (kind == "auto") kind = pend ? "pendant" : gl ? "gl" : "auto";
        if (kind == "pendant" && pend && !ell) ell = pend;
        if (kind == "gl" && gl && !ell) ell = gl;
        if (kind == "pendant" && !pend && !o.ell) throw GraphError("graph is not a line with a pendant");
        if (kind == "gl" && !gl && !o.ell) throw GraphError("graph is not three half-lines with a pendant");
    }
    if (kind == "auto") throw UsageError("no competitor construction applies; pass --kind and --ell");
    if (!ell || !(*ell > 0.0)) throw UsageError("a positive pendant length is required (--ell)");

    const SolveOptions s = solve_options(o).resolved(o.mass);
    const double lvl = line_level(o.mass, s.p);
    Report r;
    r.add("graph", label);
    r.add("kind", kind);
    r.add("mass", o.mass);
    r.add("h_max", s.h_max);
    r.add("l_inf", s.truncation);
    r.add("ell", *ell);
    if (kind == "pendant") {
        const GraphFunction u = pendant_competitor(o.mass, *ell, s.h_max, s.truncation);
        const double e = energy(u, s.p).total;
        r.add("energy", e);
        r.add("line_level", lvl);
        r.add("margin", e - lvl);
        r.add("margin_exact", pendant_competitor_margin(o.mass, *ell));
        r.add("beats_soliton", e < lvl);
        write_report(r, o, "competitor_report");
        write_profile(u, o, "competitor.csv");
    } else if (kind == "gl") {
        const double next = o.ell_new ? *o.ell_new : 2.0 * *ell;
        const MinimizeResult m = minimize(graphs::g_ell(*ell), o.mass, s);
        const GraphFunction u = gl_competitor(m.best, next);
        const double e = energy(u, s.p).total;
        r.add("ell_new", next);
        r.add("psi_start", m.best_start);
        r.add("psi_energy", m.best_report.total);
        r.add("energy", e);
        r.add("change", e - m.best_report.total);
        r.add("line_level", lvl);
        write_report(r, o, "competitor_report");
        write_profile(u, o, "competitor.csv");
    } else {
        throw UsageError("--kind must be auto, pendant or gl");
    }
    return 0;
}

int cmd_critical_length(const Options& o) {
    require_mass_and_power(o);
    const CriticalLengthResult c = critical_length(o.mass, solve_options(o), o.width);
    std::ostringstream table;
    table << "ell,best_energy,verdict\n";
    for (const LengthProbe& p : c.probes)
        table << fmt_num(p.ell) << ',' << fmt_num(p.best_energy) << ',' << to_string(p.verdict) << '\n';
    std::ofstream f = open_out(out_dir(o) / "critical_length.csv");
    f << table.str();

    Report r;
    r.add("mass", o.mass);
    r.add("ell_low", c.ell_low);
    r.add("ell_high", c.ell_high);
    r.add("ell_star", c.ell_star);
    r.add("complete", c.complete);
    r.add("monotone", c.monotone);
    r.add("probes", c.probes.size());
    if (o.format == "csv") std::cout << table.str();
    else r.write(std::cout, o.format);
    return 0;
}

int cmd_limit_table(const Options& o) {
    require_mass_and_power(o);
    std::vector<double> ells = o.ells;
    if (ells.empty())
        for (double l : {1.0, 2.0, 5.0, 10.0, 50.0}) ells.push_back(l / o.mass);
    const auto rows = gl_limit_check(o.mass, ells, solve_options(o));
    std::ostringstream table;
    table << "ell,energy,competitor_energy,start\n";
    for (const LimitRow& row : rows)
        table << fmt_num(row.ell) << ',' << fmt_num(row.energy) << ',' << fmt_num(row.competitor_energy) << ','
              << row.start << '\n';
    std::ofstream f = open_out(out_dir(o) / "limit_table.csv");
    f << table.str();
    if (o.format == "csv") {
        std::cout << table.str();
    } else {
        Report r;
        r.add("mass", o.mass);
        r.add("halfline_level", level(LevelKind::halfline, o.mass, o.p).value);
        for (const LimitRow& row : rows) r.add("energy[ell=" + fmt_num(row.ell) + "]", row.energy);
        r.write(std::cout, o.format);
    }
    return 0;
}

void add_common(CLI::App* sub, Options& o, bool graph, bool solve) {
    if (graph) {
        sub->add_option("--graph", o.graph_path, "Graph file")->check(CLI::ExistingFile);
        sub->add_option("--g-ell", o.g_ell, "Use the three-half-line graph with a pendant of this length");
    }
    sub->add_option("--mass", o.mass, "Mass mu");
    sub->add_option("--p", o.p, "Nonlinearity power, 2 < p < 6");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
    sub->add_option("--out-dir", o.out_dir, "Output directory (default $QGNLS_OUT_DIR or .)");
    if (solve) {
        sub->add_option("--h-max", o.h_max, "Mesh spacing (default 0.05/mu)");
        sub->add_option("--l-inf", o.l_inf, "Half-line truncation (default 80/mu)");
        sub->add_option("--tol-grad", o.tol_grad, "Gradient tolerance");
        sub->add_option("--tol-level", o.tol_level, "Level comparison slack (default calibrated)");
        sub->add_option("--max-iters", o.max_iters, "Iteration cap per start");
        sub->add_option("--seed", o.seed, "Seed for the random start");
    }
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Ground states of the cubic NLS on metric graphs", "qgnls"};
    app.require_subcommand(1);
    Options o;

    auto* check = app.add_subcommand("check", "Validate a graph and test Assumption (H)");
    add_common(check, o, true, false);
    auto* levels = app.add_subcommand("levels", "Print the reference energy levels");
    add_common(levels, o, false, false);
    auto* mini = app.add_subcommand("minimize", "Minimize the energy at fixed mass");
    add_common(mini, o, true, true);
    auto* classify = app.add_subcommand("classify", "Decide existence of a ground state");
    add_common(classify, o, true, true);
    auto* comp = app.add_subcommand("competitor", "Build and evaluate a surgery competitor");
    add_common(comp, o, true, true);
    comp->add_option("--kind", o.kind, "pendant, gl or auto")->check(CLI::IsMember({"auto", "pendant", "gl"}));
    comp->add_option("--ell", o.ell, "Pendant length");
    comp->add_option("--ell-new", o.ell_new, "Target pendant length for the gl construction (default 2 ell)");
    auto* crit = app.add_subcommand("critical-length", "Bisect the existence threshold on G_ell");
    add_common(crit, o, false, true);
    crit->add_option("--width", o.width, "Bracket width (default 1e-2/mu)");
    auto* limit = app.add_subcommand("limit-table", "Energies on G_ell for growing pendants");
    add_common(limit, o, false, true);
    limit->add_option("--ells", o.ells, "Pendant lengths, increasing")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& c : msg)
            if (c == '\n') c = ' ';
        std::cerr << "qgnls: error: " << msg << '\n';
        return kExitError;
    }

    try {
        if (*check) return cmd_check(o);
        if (*levels) return cmd_levels(o);
        if (*mini) return cmd_minimize(o);
        if (*classify) return cmd_classify(o);
        if (*comp) return cmd_competitor(o);
        if (*crit) return cmd_critical_length(o);
        if (*limit) return cmd_limit_table(o);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg)
            if (c == '\n') c = ' ';
        std::cerr << "qgnls: error: " << msg << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace qgnls::cli
