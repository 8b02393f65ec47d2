#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lagrot/convex.hpp"
#include "lagrot/io.hpp"
#include "lagrot/rotation.hpp"
#include "lagrot/solver.hpp"
#include "lagrot/verify.hpp"

namespace {

using nlohmann::json;
using namespace lagrot;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;     // solver failure / rejected input
constexpr int kExitBounds = 3;      // rotation Hessian-bound violation
constexpr int kExitVerifyFail = 4;  // verify suite has failing checks

struct GlobalOpts {
    double tol = 1e-8;
    std::uint64_t seed = 42;
    bool quiet = false;
};

Grid parse_grid_spec(const std::string& spec) {
    // "n=129,box=[-1,1]^2"
    int n = 0, dim = 0;
    double lo = 0, hi = 0;
    std::string s = spec;
    for (auto& c : s)
        if (c == ',') c = ' ';
    char boxbuf[64];
    if (std::sscanf(s.c_str(), " n=%d box=%63s", &n, boxbuf) != 2)
        throw std::invalid_argument("bad --grid spec (expected \"n=129,box=[-1,1]^2\"): " + spec);
    if (std::sscanf(boxbuf, "[%lf,%lf]^%d", &lo, &hi, &dim) != 3)
        throw std::invalid_argument("bad box in --grid spec: " + spec);
    return make_grid_box(dim, lo, hi, n);
}

std::vector<std::pair<std::int64_t, double>> read_boundary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    const json& arr = j.is_array() ? j : j.at("boundary");
    std::vector<std::pair<std::int64_t, double>> out;
    for (const auto& e : arr)
        out.emplace_back(e.at("node").get<std::int64_t>(), e.at("value").get<double>());
    return out;
}

void write_json_report(const std::string& path, const json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

json report_from_solve(const SolveReport& rep, OperatorVariant variant, const Grid& g) {
    json j;
    j["type"] = "solve";
    j["variant"] = variant_name(variant);
    j["grid"] = {{"dim", g.dim}, {"shape", std::vector<int>(g.shape.begin(), g.shape.begin() + g.dim)},
                 {"spacing", g.spacing}};
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["damping_events"] = rep.damping_events;
    j["final_residual"] = rep.final_residual;
    j["residual_history"] = rep.residual_history;
    j["eig_min"] = rep.eig_min;
    j["eig_max"] = rep.eig_max;
    j["convex"] = rep.convex;
    if (!rep.error.empty()) j["error"] = rep.error;
    return j;
}

int cmd_solve(const GlobalOpts& g, const std::string& phase_path, const std::string& bc_path,
              const std::string& grid_spec, const std::string& variant_name_str,
              const std::string& out_path, const std::string& report_path,
              const std::string& oracle_path, int steps) {
    DirichletProblem p;
    p.variant = variant_from_name(variant_name_str);
    p.phase = read_scalar_field(phase_path);
    p.grid = grid_spec.empty() ? p.phase.grid : parse_grid_spec(grid_spec);
    if (!p.grid.same_layout(p.phase.grid))
        throw std::invalid_argument("--grid does not match the phase field grid");
    p.boundary = read_boundary(bc_path);

    SolveOptions sopts;
    sopts.tol = g.tol;
    sopts.quiet = g.quiet;

    SolveReport rep;
    ScalarField u;
    if (steps > 0) {
        ContinuationResult r = continuation_solve(p, steps, sopts);
        rep = r.steps.empty() ? SolveReport{} : r.steps.back();
        rep.converged = r.converged;
        u = std::move(r.u);
    } else {
        SolveResult r = solve(p, sopts);
        rep = std::move(r.report);
        u = std::move(r.u);
    }

    json j = report_from_solve(rep, p.variant, p.grid);
    if (!oracle_path.empty() && rep.converged) {
        const ScalarField oracle = read_scalar_field(oracle_path);
        double err = 0.0;
        for (size_t i = 0; i < u.values.size(); ++i)
            err = std::max(err, std::abs(u.values[i] - oracle.values[i]));
        j["oracle_sup_error"] = err;
        if (!g.quiet) std::printf("sup error vs oracle: %.6e\n", err);
    }
    if (!report_path.empty()) write_json_report(report_path, j);
    if (rep.converged && !out_path.empty()) write_scalar_field(out_path, u);

    if (!g.quiet)
        std::printf("solve: %s (residual %.3e, %d iterations)\n",
                    rep.converged ? "converged" : rep.error.c_str(), rep.final_residual,
                    rep.iterations);
    return rep.converged ? kExitOk : kExitFailure;
}

int cmd_rotate(const GlobalOpts& g, const std::string& in_path, double angle_deg,
               const std::string& out_path, const std::string& report_path) {
    const ScalarField uf = read_scalar_field(in_path);
    ConvexPotential u = make_convex_potential(uf);
    if (!u.certified) {
        std::fprintf(stderr, "rotate: input not convex (node %lld, min eigenvalue %g)\n",
                     static_cast<long long>(u.report.violating_node), u.report.min_eigenvalue);
        return kExitFailure;
    }
    const RotationAngle angle = RotationAngle::from_degrees(angle_deg);

    RotatedPotential r;
    try {
        r = rotate(u, angle);
    } catch (const BoundViolationError& e) {
        std::fprintf(stderr, "rotate: %s\n", e.what());
        return kExitBounds;
    }

    const AngleShiftResult shift = angle_shift_check(u, r);

    if (!report_path.empty()) {
        json j;
        j["type"] = "rotation";
        j["angle_deg"] = angle_deg;
        j["lambda_min"] = r.bounds.lambda_min;
        j["lambda_max"] = r.bounds.lambda_max;
        j["bound_tolerance"] = r.bounds.tolerance;
        j["bound_violations"] = r.bounds.violations;
        j["coverage_fraction"] = shift.coverage;
        j["angle_shift_max_deviation"] = shift.max_deviation;
        const int bins = 48;
        const double lo = -1.2, hi = 1.2;
        std::vector<std::int64_t> counts(bins, 0);
        for (std::int64_t k = 0; k < r.lambda_bar.grid.node_count(); ++k)
            for (int i = 0; i < r.lambda_bar.ncomp; ++i) {
                const double l = r.lambda_bar(k, i);
                int b = static_cast<int>((l - lo) / (hi - lo) * bins);
                b = std::clamp(b, 0, bins - 1);
                ++counts[b];
            }
        j["lambda_histogram"] = {{"lo", lo}, {"hi", hi}, {"bins", bins}, {"counts", counts}};
        write_json_report(report_path, j);
    }
    if (!out_path.empty()) write_scalar_field(out_path, r.ubar);
    if (!g.quiet)
        std::printf("rotate: lambda range [%.4f, %.4f], tolerance %.4f, coverage %.2f\n",
                    r.bounds.lambda_min, r.bounds.lambda_max, r.bounds.tolerance, shift.coverage);
    return kExitOk;
}

int cmd_legendre(const GlobalOpts& g, const std::string& in_path, const std::string& out_path,
                 const std::string& dual_path) {
    const ScalarField f = read_scalar_field(in_path);
    ConvexPotential p = make_convex_potential(f);
    if (!p.certified) {
        std::fprintf(stderr, "legendre: input not convex (node %lld, min eigenvalue %g)\n",
                     static_cast<long long>(p.report.violating_node), p.report.min_eigenvalue);
        return kExitFailure;
    }
    std::optional<Grid> dual;
    if (!dual_path.empty()) dual = read_grid(dual_path);
    const DualSamples d = legendre(p, dual);
    write_scalar_field(out_path, d.values);
    if (!g.quiet)
        std::printf("legendre: wrote %s (output %s)\n", out_path.c_str(),
                    d.certified ? "certified convex" : "NOT certified convex");
    return kExitOk;
}

int cmd_verify(const GlobalOpts& g, const std::string& suite, const std::string& in_path,
               const std::string& phase_path, const std::string& report_path) {
    VerifyOptions vo;
    vo.seed = g.seed;
    vo.quiet = g.quiet;
    vo.in_path = in_path;
    vo.phase_path = phase_path;
    const SuiteResult res = run_suite(suite, vo);

    if (!report_path.empty()) {
        json j;
        j["type"] = "verify";
        j["suite"] = res.suite;
        j["seed"] = res.seed;
        j["all_pass"] = res.all_pass();
        json checks = json::array();
        for (const auto& c : res.checks)
            checks.push_back({{"name", c.name},
                              {"pass", c.pass},
                              {"measured", c.measured},
                              {"tolerance", c.tolerance}});
        j["checks"] = checks;
        if (!res.omega.radius.empty())
            j["omega_table"] = {{"r", res.omega.radius}, {"omega", res.omega.omega}};
        write_json_report(report_path, j);
    }
    if (!g.quiet)
        std::printf("verify %s: %zu checks, %s\n", suite.c_str(), res.checks.size(),
                    res.all_pass() ? "all pass" : "FAILURES");
    return res.all_pass() ? kExitOk : kExitVerifyFail;
}

int cmd_probe(const GlobalOpts& g, const std::string& family, int count, int n,
              const std::string& report_path) {
    ProbeOptions po;
    po.family = family == "quadratic" ? ProbeFamily::quadratic : ProbeFamily::quartic;
    po.count = count;
    po.n = n;
    po.solve.tol = g.tol;
    const ProbeResult res = hessian_estimate_probe(po);

    json j;
    j["type"] = "probe";
    j["family"] = family;
    j["exponent"] = res.exponent;
    j["c1"] = res.c1;
    j["c2"] = res.c2;
    j["r_squared"] = res.r_squared;
    json rows = json::array();
    for (const auto& r : res.rows)
        rows.push_back({{"scale", r.scale}, {"osc", r.osc}, {"hess_norm0", r.hess_norm0}});
    j["rows"] = rows;
    if (!report_path.empty()) write_json_report(report_path, j);
    if (!g.quiet)
        std::printf("probe: ln|D2u(0)| ~ ln(%.4g) + %.4g * osc^%d (R^2 = %.4f)\n", res.c1, res.c2,
                    res.exponent, res.r_squared);
    return kExitOk;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::string text = header + "\n";
    for (const auto& r : rows) text += r + "\n";
    atomic_write_text(path, text);
}

int cmd_report(const GlobalOpts& g, const std::string& in_path, const std::string& out_dir) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open file: " + in_path);
    json j;
    in >> j;
    const std::string type = j.value("type", "");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    int written = 0;

    if (type == "solve") {
        std::vector<std::string> rows;
        const auto& hist = j.at("residual_history");
        for (size_t i = 0; i < hist.size(); ++i)
            rows.push_back(std::to_string(i) + "," + format_double(hist[i].get<double>()));
        write_csv((fs::path(out_dir) / "residual_history.csv").string(), "iteration,residual",
                  rows);
        ++written;
    } else if (type == "rotation") {
        const auto& hist = j.at("lambda_histogram");
        const double lo = hist.at("lo").get<double>(), hi = hist.at("hi").get<double>();
        const int bins = hist.at("bins").get<int>();
        std::vector<std::string> rows;
        for (int b = 0; b < bins; ++b) {
            const double bl = lo + (hi - lo) * b / bins, bh = lo + (hi - lo) * (b + 1) / bins;
            rows.push_back(format_double(bl) + "," + format_double(bh) + "," +
                           std::to_string(hist.at("counts")[b].get<std::int64_t>()));
        }
        write_csv((fs::path(out_dir) / "lambda_histogram.csv").string(), "bin_lo,bin_hi,count",
                  rows);
        ++written;
    } else if (type == "verify") {
        if (j.contains("omega_table")) {
            const auto& t = j.at("omega_table");
            std::vector<std::string> rows;
            for (size_t i = 0; i < t.at("r").size(); ++i)
                rows.push_back(format_double(t.at("r")[i].get<double>()) + "," +
                               format_double(t.at("omega")[i].get<double>()));
            write_csv((fs::path(out_dir) / "omega_r.csv").string(), "r,omega", rows);
            ++written;
        }
        std::vector<std::string> rows;
        for (const auto& c : j.at("checks"))
            rows.push_back(c.at("name").get<std::string>() + "," +
                           (c.at("pass").get<bool>() ? "1" : "0") + "," +
                           format_double(c.at("measured").get<double>()) + "," +
                           format_double(c.at("tolerance").get<double>()));
        write_csv((fs::path(out_dir) / "verify_checks.csv").string(),
                  "name,pass,measured,tolerance", rows);
        ++written;
    } else if (type == "probe") {
        std::vector<std::string> rows;
        for (const auto& r : j.at("rows"))
            rows.push_back(format_double(r.at("scale").get<double>()) + "," +
                           format_double(r.at("osc").get<double>()) + "," +
                           format_double(r.at("hess_norm0").get<double>()));
        write_csv((fs::path(out_dir) / "probe_scatter.csv").string(), "scale,osc,hess_norm0",
                  rows);
        write_csv((fs::path(out_dir) / "probe_fit.csv").string(), "c1,c2,exponent,r_squared",
                  {format_double(j.at("c1").get<double>()) + "," +
                   format_double(j.at("c2").get<double>()) + "," +
                   std::to_string(j.at("exponent").get<int>()) + "," +
                   format_double(j.at("r_squared").get<double>())});
        written += 2;
    } else {
        throw std::runtime_error("unknown report type in " + in_path);
    }
    if (!g.quiet) std::printf("report: wrote %d file(s) to %s\n", written, out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lagrot: rotation, phase-operator, and solver toolkit for "
                 "Lagrangian mean curvature potentials on grids"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--tol", g.tol, "solver tolerance");
    app.add_option("--seed", g.seed, "seed for all randomized checks");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    auto* sc_solve = app.add_subcommand("solve", "solve the Dirichlet problem");
    std::string phase_path, bc_path, grid_spec, variant = "arctan", out_path, report_path,
                oracle_path;
    int steps = 0;
    sc_solve->add_option("--phase", phase_path, "phase field JSON")->required();
    sc_solve->add_option("--boundary", bc_path, "boundary values JSON")->required();
    sc_solve->add_option("--grid", grid_spec, "grid spec, e.g. \"n=129,box=[-1,1]^2\"");
    sc_solve->add_option("--variant", variant, "arctan | mconcave | madual");
    sc_solve->add_option("--out", out_path, "solution output JSON");
    sc_solve->add_option("--report", report_path, "solve report JSON");
    sc_solve->add_option("--oracle", oracle_path, "exact solution for error reporting");
    sc_solve->add_option("--steps", steps, "continuation steps (0 = direct solve)");

    auto* sc_rotate = app.add_subcommand("rotate", "rotate a convex potential");
    std::string rot_in, rot_out, rot_report;
    double angle_deg = 45.0;
    sc_rotate->add_option("--in", rot_in, "potential JSON")->required();
    sc_rotate->add_option("--angle-deg", angle_deg, "rotation angle in degrees");
    sc_rotate->add_option("--out", rot_out, "rotated potential output JSON");
    sc_rotate->add_option("--report", rot_report, "rotation report JSON");

    auto* sc_leg = app.add_subcommand("legendre", "Legendre transform of a convex potential");
    std::string leg_in, leg_out, leg_dual;
    sc_leg->add_option("--in", leg_in, "potential JSON")->required();
    sc_leg->add_option("--out", leg_out, "transform output JSON")->required();
    sc_leg->add_option("--dual-grid", leg_dual, "dual grid JSON (default: auto slope range)");

    auto* sc_verify = app.add_subcommand("verify", "run an invariant suite");
    std::string suite = "all", ver_in, ver_phase, ver_report;
    sc_verify->add_option("--suite", suite, "convex|rotation|operator|geometry|solver|all");
    sc_verify->add_option("--in", ver_in, "suite input field JSON");
    sc_verify->add_option("--phase", ver_phase, "geometry suite phase JSON");
    sc_verify->add_option("--report", ver_report, "results JSON");

    auto* sc_probe = app.add_subcommand("probe", "Hessian-estimate probe over a solve family");
    std::string family = "quartic", probe_report;
    int probe_count = 8, probe_n = 33;
    sc_probe->add_option("--family", family, "quadratic | quartic");
    sc_probe->add_option("--count", probe_count, "family size");
    sc_probe->add_option("--n", probe_n, "nodes per axis");
    sc_probe->add_option("--out", probe_report, "probe report JSON");

    auto* sc_report = app.add_subcommand("report", "emit CSV series from a report JSON");
    std::string rep_in, rep_dir = ".";
    sc_report->add_option("--in", rep_in, "report JSON")->required();
    sc_report->add_option("--out-dir", rep_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_solve->parsed())
            return cmd_solve(g, phase_path, bc_path, grid_spec, variant, out_path, report_path,
                             oracle_path, steps);
        if (sc_rotate->parsed()) return cmd_rotate(g, rot_in, angle_deg, rot_out, rot_report);
        if (sc_leg->parsed()) return cmd_legendre(g, leg_in, leg_out, leg_dual);
        if (sc_verify->parsed()) return cmd_verify(g, suite, ver_in, ver_phase, ver_report);
        if (sc_probe->parsed()) return cmd_probe(g, family, probe_count, probe_n, probe_report);
        if (sc_report->parsed()) return cmd_report(g, rep_in, rep_dir);
    } catch (const BoundViolationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBounds;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
