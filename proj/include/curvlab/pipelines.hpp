#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/asymptotics.hpp"
#include "curvlab/audit.hpp"
#include "curvlab/config.hpp"
#include "curvlab/csv.hpp"
#include "curvlab/elliptic.hpp"
#include "curvlab/parabolic.hpp"

namespace curvlab {

struct ModeResult {
    bool passed = true;
    std::vector<std::string> summary;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        summary.push_back("check " + name + ": " + (ok ? "PASS" : "FAIL") +
                          (detail.empty() ? "" : " (" + detail + ")"));
        passed = passed && ok;
    }
    void note(const std::string& line) { summary.push_back(line); }
};

namespace pipeline {

inline Shape shape_from(const RunConfig& cfg) {
    if (cfg.shape == "ball") return Shape(Ball{cfg.dim, cfg.radius});
    if (cfg.shape == "ellipse") return Shape(Ellipse2D{cfg.a, cfg.b});
    return Shape(HalfSpace{cfg.dim});
}

inline Conductivity cond_from(const RunConfig& cfg) {
    return Conductivity{cfg.sigma_plus, cfg.sigma_minus};
}

inline std::vector<double> default_lambda_ladder() {
    return {1e2, 1e3, 1e4, 1e5, 1e6};
}

// --- verify-elliptic --------------------------------------------------------

inline ModeResult run_verify_elliptic(const RunConfig& cfg,
                                      const std::filesystem::path& out) {
    if (cfg.shape == "ellipse")
        throw ConfigError("verify-elliptic handles ball/halfspace; use ellipse-scan");
    const Conductivity c = cond_from(cfg);
    const auto ladder = cfg.lambda_ladder.empty() ? default_lambda_ladder() : cfg.lambda_ladder;
    ModeResult res;

    if (cfg.shape == "halfspace") {
        const double tol = cfg.tolerance > 0 ? cfg.tolerance : 1e-10;
        std::vector<std::pair<double, double>> uvals;
        std::vector<double> origin(cfg.dim, 0.0);
        for (double lam : ladder) uvals.emplace_back(lam, halfspace_solution(origin, lam, c));
        const auto ex = extrapolate_lambda_ladder(uvals, c);
        write_report_csv(out / "elliptic_report.csv", ex, 0.0);
        double worst = 0.0;
        for (const auto& [h, v] : ex.sequence) worst = std::max(worst, std::abs(v));
        res.note("flat interface: deficit functional should vanish identically");
        res.note("max |functional| over ladder = " + g17(worst));
        res.check("halfspace-null", worst <= tol, "tolerance " + g17(tol));
        return res;
    }

    if (cfg.dim != 2 && cfg.dim != 3)
        throw ConfigError("verify-elliptic: ball dim must be 2 or 3");
    const Ball ball{cfg.dim, cfg.radius};
    const double tol = cfg.tolerance > 0 ? cfg.tolerance : 0.005;
    const double expected =
        FormulaConstants::from(c).elliptic_coeff * (cfg.dim - 1) / cfg.radius;

    std::vector<std::pair<double, double>> uvals;
    for (double lam : ladder) {
        double u;
        if (cfg.solver == "bessel") {
            u = solve_radial_bessel(ball, c, lam).boundary_value;
        } else {
            const double h0f = cfg.h0_factor > 0 ? cfg.h0_factor : 0.02;
            const auto grid = default_elliptic_grid(cfg.radius, c, lam, h0f, cfg.stretch,
                                                    cfg.margin_factor);
            const auto f = solve_radial_fd(ball, c, lam, grid);
            u = f.interface_value();
            if (cfg.export_fields)
                write_field_csv(out / ("field_lambda_" + g17(lam) + ".csv"), f);
        }
        uvals.emplace_back(lam, u);
    }
    const auto ex = extrapolate_lambda_ladder(uvals, c);
    write_report_csv(out / "elliptic_report.csv", ex, expected);
    const double rel = std::abs(ex.limit - expected) / expected;
    res.note("extracted limit = " + g17(ex.limit) + " (solver " + cfg.solver + ")");
    res.note("expected coeff*(N-1)*H = " + g17(expected));
    res.note("relative error = " + g17(rel) +
             ", extrapolation error estimate = " + g17(ex.error_estimate));
    res.check("elliptic-limit", rel <= tol && ex.model_consistent,
              "rel_err " + g17(rel) + " vs tol " + g17(tol));
    return res;
}

// --- verify-parabolic -------------------------------------------------------

inline ModeResult run_verify_parabolic(const RunConfig& cfg,
                                       const std::filesystem::path& out) {
    if (cfg.shape != "ball") throw ConfigError("verify-parabolic handles balls only");
    if (cfg.dim != 2 && cfg.dim != 3)
        throw ConfigError("verify-parabolic: ball dim must be 2 or 3");
    const Conductivity c = cond_from(cfg);
    const Ball ball{cfg.dim, cfg.radius};
    const double tol = cfg.tolerance > 0 ? cfg.tolerance : 0.05;

    ParabolicOptions opt;
    opt.t0_factor = cfg.t0_factor;
    opt.tmax_factor = cfg.tmax_factor;
    opt.time_ratio = cfg.time_ratio;
    opt.startup_steps = cfg.startup_steps;
    if (cfg.h0_factor > 0) opt.h0_factor = cfg.h0_factor;
    opt.stretch = cfg.stretch;
    const auto sol = solve_radial_parabolic_with_estimate(ball, c, opt);
    write_trace_csv(out / "trace.csv", sol.trace);

    const double t_hi = 0.08 * sol.trace.t_max();
    const auto ex = extract_time_limit(sol.trace, c, t_hi);
    const double expected =
        FormulaConstants::from(c).parabolic_coeff * (cfg.dim - 1) / cfg.radius;
    write_report_csv(out / "parabolic_report.csv", ex.extrapolation, expected);

    const double rel = std::abs(ex.extrapolation.limit - expected) / expected;
    ModeResult res;
    res.note("extracted limit = " + g17(ex.extrapolation.limit));
    res.note("expected coeff*(N-1)*H = " + g17(expected));
    res.note("relative error = " + g17(rel));
    res.note("head contribution = " + g17(ex.functional.head_integral) +
             ", head uncertainty on limit = " + g17(ex.head_uncertainty_on_limit));
    res.note("trace discretization estimate = " + g17(sol.error_estimate));
    res.check("parabolic-limit", rel <= tol, "rel_err " + g17(rel) + " vs tol " + g17(tol));
    res.check("head-uncertainty", ex.head_uncertainty_on_limit < tol * expected,
              g17(ex.head_uncertainty_on_limit) + " < " + g17(tol * expected));
    return res;
}

// --- ellipse-scan -----------------------------------------------------------

struct EllipseScanRow {
    double x, y, kappa_geom, kappa_extracted, rel_err;
    std::vector<double> raw;  // per-lambda functional values
};

inline ModeResult run_ellipse_scan(const RunConfig& cfg, const std::filesystem::path& out) {
    if (cfg.shape != "ellipse") throw ConfigError("ellipse-scan requires shape = ellipse");
    const Shape ell(Ellipse2D{cfg.a, cfg.b});
    const Conductivity c = cond_from(cfg);
    const auto ladder =
        cfg.lambda_ladder.empty() ? std::vector<double>{1e3, 4e3, 1.6e4} : cfg.lambda_ladder;
    const double tol = cfg.tolerance > 0 ? cfg.tolerance : 0.10;
    const double coeff = FormulaConstants::from(c).elliptic_coeff;

    std::vector<CartesianField2D> fields;
    for (double lam : ladder) {
        const auto grid = make_cartesian_grid(ell, c, lam, cfg.nx, cfg.ny, cfg.margin_factor);
        fields.push_back(solve_cartesian_2d(ell, c, lam, grid));
        if (cfg.export_fields)
            write_field_csv(out / ("field_lambda_" + g17(lam) + ".csv"), fields.back());
    }

    auto extract = [&](std::span<const double> p) {
        std::vector<std::pair<double, double>> hs;
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            const auto probe = probe_interface_value(fields[i], ell, p);
            hs.emplace_back(1.0 / ladder[i], std::sqrt(ladder[i]) * probe.deficit);
        }
        std::sort(hs.begin(), hs.end(), [](auto& u, auto& v) { return u.first > v.first; });
        return richardson_extrapolate(hs, 0.5);
    };

    ModeResult res;
    std::vector<EllipseScanRow> rows;
    double worst = 0.0;
    for (const auto& p : ell.interface_samples(cfg.points)) {
        const auto ex = extract(p);
        EllipseScanRow row;
        row.x = p[0];
        row.y = p[1];
        row.kappa_geom = ell.mean_curvature(p);
        row.kappa_extracted = ex.limit / coeff;
        row.rel_err = (row.kappa_extracted - row.kappa_geom) / row.kappa_geom;
        for (const auto& [h, v] : ex.sequence) row.raw.push_back(v);
        worst = std::max(worst, std::abs(row.rel_err));
        rows.push_back(std::move(row));
    }

    {
        CsvFile csv(out / "ellipse_scan.csv");
        csv.comment("sigma_plus=" + g17(c.sigma_plus) + " sigma_minus=" +
                    g17(c.sigma_minus) + " shape=" + ell.describe());
        std::string hdr = "x,y,kappa_geom,kappa_extracted,rel_err";
        for (double lam : ladder) hdr += ",functional_lambda_" + g17(lam);
        csv.header(hdr);
        for (const auto& r : rows) {
            std::vector<double> vals{r.x, r.y, r.kappa_geom, r.kappa_extracted, r.rel_err};
            for (double v : r.raw) vals.push_back(v);
            csv.row(vals);
        }
    }

    // anisotropy ratio between the curvature extremes (a,0) and (0,b)
    const double k_major = extract(std::vector<double>{cfg.a, 0.0}).limit / coeff;
    const double k_minor = extract(std::vector<double>{0.0, cfg.b}).limit / coeff;
    const double ratio = k_major / k_minor;
    const double ratio_expected = std::pow(cfg.a / cfg.b, 3);  // (a/b^2)/(b/a^2)

    res.note("kappa extracted at (a,0) = " + g17(k_major) + " (geometric " +
             g17(cfg.a / (cfg.b * cfg.b)) + ")");
    res.note("kappa extracted at (0,b) = " + g17(k_minor) + " (geometric " +
             g17(cfg.b / (cfg.a * cfg.a)) + ")");
    res.note("curvature ratio = " + g17(ratio) + ", expected " + g17(ratio_expected));
    res.note("worst pointwise relative error over " + std::to_string(cfg.points) +
             " samples = " + g17(worst));
    res.check("curvature-ratio", std::abs(ratio - ratio_expected) <= tol * ratio_expected,
              g17(ratio) + " vs " + g17(ratio_expected));
    res.check("pointwise-curvature", worst <= tol,
              "worst rel_err " + g17(worst) + " vs tol " + g17(tol));
    return res;
}

// --- barrier-audit ----------------------------------------------------------

inline ModeResult run_barrier_audit(const RunConfig& cfg, const std::filesystem::path& out) {
    if (cfg.shape != "ball") throw ConfigError("barrier-audit handles balls only");
    const Conductivity c = cond_from(cfg);
    const Ball ball{cfg.dim, cfg.radius};
    const Shape shape(ball);

    ParabolicOptions opt;
    opt.t0_factor = cfg.t0_factor;
    opt.tmax_factor = cfg.tmax_factor;
    opt.time_ratio = cfg.time_ratio;
    if (cfg.h0_factor > 0) opt.h0_factor = cfg.h0_factor;
    opt.snapshots = 14;
    const auto sol = solve_radial_parabolic_with_estimate(ball, c, opt);

    const double k_cal = calibrate_K(shape, c);
    const double K = cfg.k_override >= 0 ? cfg.k_override : k_cal;
    const double slack = 3.0 * sol.error_estimate;

    const auto par = barrier_check_parabolic(sol, ball, c, K, slack);
    ModeResult res;
    res.note("K_cal = " + g17(k_cal) + ", K used = " + g17(K) + ", slack = " + g17(slack));
    res.note("parabolic sandwich: " + par.describe());
    res.check("barrier-parabolic", par.pass);

    CsvFile csv(out / "barrier_report.csv");
    csv.header("check,K,max_violation,witness_delta,witness_t_or_lambda,pass");
    csv.row({0.0, K, par.max_violation, par.witness_delta, par.witness_time,
             par.pass ? 1.0 : 0.0});
    int idx = 1;
    for (double lam : {1e2, 1e4}) {
        const auto s = solve_radial_bessel(ball, c, lam);
        const auto rep = barrier_check_elliptic([&](double r) { return s(r); }, ball, c,
                                                K, lam, 0.0);
        res.note("elliptic sandwich (lambda=" + g17(lam) + "): " + rep.describe());
        res.check("barrier-elliptic-" + g17(lam), rep.pass);
        csv.row({static_cast<double>(idx++), K, rep.max_violation, rep.witness_delta,
                 rep.witness_time, rep.pass ? 1.0 : 0.0});
    }
    return res;
}

// --- karamata-check ---------------------------------------------------------

inline ModeResult run_karamata(const RunConfig& cfg, const std::filesystem::path& out) {
    const double tol = cfg.tolerance > 0 ? cfg.tolerance : 0.01;
    ModeResult res;
    KaramataReport rep;
    if (cfg.measure == "sqrt_t" || cfg.measure == "lebesgue") {
        const auto mu = cfg.measure == "sqrt_t" ? make_sqrt_t_measure(1e-6, 0.5, 1.02)
                                                : make_lebesgue_measure(1e-6, 0.5, 1.02);
        rep = karamata_check(mu, cfg.alpha);
    } else {
        // the paper-style ell measure from a Ball(3,1)-type run
        const Conductivity c = cond_from(cfg);
        const Ball ball{cfg.dim, cfg.radius};
        ParabolicOptions opt;
        opt.t0_factor = cfg.t0_factor;
        opt.tmax_factor = std::max(cfg.tmax_factor, 4.0);  // reach lambda t_max >= 30
        const auto sol = solve_radial_parabolic(ball, c, opt);
        const double K = calibrate_K(Shape(ball), c);
        const double t_start = 10.0 * opt.t0_factor * ball.radius * ball.radius / c.max_sigma();
        const auto ell = make_ell_measure(sol.trace, c, K, t_start);
        const double lam_hi = 0.095 / ell.times.front();
        std::vector<double> ladder;
        for (int k = 4; k >= 0; --k) ladder.push_back(lam_hi / std::pow(1.9, k));
        rep = karamata_check(ell, cfg.alpha, ladder);
    }

    write_report_csv(out / "karamata_transform.csv", rep.transform_limit,
                     rep.transform_limit.limit);
    write_report_csv(out / "karamata_smalltime.csv", rep.smalltime_limit,
                     rep.smalltime_limit.limit);
    const double rel = std::abs(rep.ratio / rep.expected_ratio - 1.0);
    res.note("measure " + cfg.measure + ", alpha = " + g17(cfg.alpha));
    res.note("transform limit = " + g17(rep.transform_limit.limit) +
             ", small-time limit = " + g17(rep.smalltime_limit.limit));
    res.note("ratio = " + g17(rep.ratio) + ", Gamma(alpha+1) = " + g17(rep.expected_ratio));
    res.check("karamata-ratio", rel <= tol, "rel dev " + g17(rel) + " vs tol " + g17(tol));
    return res;
}

// --- sweep ------------------------------------------------------------------

struct SweepRun {
    std::string label;
    RangeReport report;
};

inline SweepRun sweep_single(std::uint64_t seed, int index) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(index) * 7919);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto logu = [&](double lo, double hi) {
        return lo * std::pow(hi / lo, uni(rng));
    };
    const Conductivity c{logu(0.25, 4.0), logu(0.25, 4.0)};
    const double lambda = logu(1e2, 1e4);
    const int kind = static_cast<int>(uni(rng) * 4.0) % 4;

    SweepRun run;
    std::ostringstream label;
    if (kind == 0 || kind == 1) {
        const Ball ball{kind == 0 ? 2 : 3, 0.5 + 1.5 * uni(rng)};
        label << "ball dim=" << ball.dim << " R=" << g17(ball.radius);
        const auto f = solve_radial_fd(ball, c, lambda,
                                       default_elliptic_grid(ball.radius, c, lambda));
        run.report = maximum_principle_check(f);
    } else if (kind == 2) {
        const double a = 1.0 + uni(rng), b = 0.5 + uni(rng) * 0.5;
        const Shape ell(Ellipse2D{std::max(a, b), std::min(a, b)});
        label << ell.describe();
        const auto grid = make_cartesian_grid(ell, c, lambda, 192, 192);
        const auto f = solve_cartesian_2d(ell, c, lambda, grid);
        run.report = maximum_principle_check(f, 1e-9);  // CG-tolerance limited
    } else {
        const Shape hs(HalfSpace{2});
        label << hs.describe();
        std::vector<double> vals;
        for (int i = 0; i <= 200; ++i) {
            const double xn = -2.0 + 4.0 * i / 200.0;
            vals.push_back(halfspace_solution(std::vector<double>{0.0, xn}, lambda, c));
        }
        run.report = maximum_principle_check(vals, nullptr, 1e-15);
    }
    label << " sigma=(" << g17(c.sigma_plus) << ", " << g17(c.sigma_minus) << ")"
          << " lambda=" << g17(lambda);
    run.label = label.str();
    return run;
}

inline ModeResult run_sweep(const RunConfig& cfg, const std::filesystem::path& out) {
    ModeResult res;
    std::vector<SweepRun> runs(cfg.count);
    if (cfg.jobs > 1) {
        std::vector<std::future<SweepRun>> fut;
        for (int i = 0; i < cfg.count; ++i)
            fut.push_back(std::async(std::launch::async, sweep_single, cfg.seed, i));
        for (int i = 0; i < cfg.count; ++i) runs[i] = fut[i].get();
    } else {
        for (int i = 0; i < cfg.count; ++i) runs[i] = sweep_single(cfg.seed, i);
    }
    CsvFile csv(out / "sweep.csv");
    csv.header("run,min_value,max_value,pass");
    for (int i = 0; i < cfg.count; ++i) {
        csv.row({static_cast<double>(i), runs[i].report.min_value,
                 runs[i].report.max_value, runs[i].report.pass ? 1.0 : 0.0});
        res.check("range-" + std::to_string(i), runs[i].report.pass,
                  runs[i].label + " " + runs[i].report.describe());
    }
    return res;
}

}  // namespace pipeline

// ---------------------------------------------------------------------------
// Batch front end.
// ---------------------------------------------------------------------------

inline const char* cli_usage() {
    return "usage: curvlab <mode> [--config file] [--key value ...]\n"
           "modes: verify-elliptic, verify-parabolic, ellipse-scan, barrier-audit,\n"
           "       karamata-check, sweep\n"
           "Flags mirror the config keys (kebab-case); flags override file values.\n"
           "CURVLAB_OUT overrides the output directory.\n";
}

/// Executes one batch run. Exit codes: 0 all checks passed, 1 a check failed,
/// 2 usage/config error, 3 numeric error.
inline int run_command(const std::vector<std::string>& argv,
                       std::ostream& log = std::cout) {
    std::string mode;
    KeyValues kv;
    try {
        if (argv.empty()) throw ConfigError("missing mode");
        if (argv[0] == "--help" || argv[0] == "-h") {
            log << cli_usage();
            return 0;
        }
        mode = argv[0];
        KeyValues flags = parse_cli_flags(std::vector<std::string>(argv.begin() + 1,
                                                                   argv.end()));
        if (auto cfgpath = flags.get("config")) kv = parse_config_file(*cfgpath);
        kv.override_with(flags);
        KeyValues mode_kv;
        mode_kv.set("mode", mode);
        kv.override_with(mode_kv);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n" << cli_usage();
        return 2;
    }

    RunConfig cfg;
    try {
        cfg = RunConfig::from_keyvalues(kv);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }

    // output directory: CURVLAB_OUT wins, then --out/config, then the default
    std::filesystem::path out = "curvlab-out";
    if (!cfg.out_dir.empty()) out = cfg.out_dir;
    if (const char* env = std::getenv("CURVLAB_OUT")) out = env;

    ModeResult res;
    int code = 0;
    try {
        std::filesystem::create_directories(out);
        if (cfg.mode == "verify-elliptic")
            res = pipeline::run_verify_elliptic(cfg, out);
        else if (cfg.mode == "verify-parabolic")
            res = pipeline::run_verify_parabolic(cfg, out);
        else if (cfg.mode == "ellipse-scan")
            res = pipeline::run_ellipse_scan(cfg, out);
        else if (cfg.mode == "barrier-audit")
            res = pipeline::run_barrier_audit(cfg, out);
        else if (cfg.mode == "karamata-check")
            res = pipeline::run_karamata(cfg, out);
        else
            res = pipeline::run_sweep(cfg, out);
        code = res.passed ? 0 : 1;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "numeric error: " << e.what() << "\n";
        res.note(std::string("numeric error: ") + e.what());
        code = 3;
    }

    std::ofstream summary(out / "summary.txt", std::ios::app);
    auto emit = [&](const std::string& line) {
        summary << line << "\n";
        log << line << "\n";
    };
    emit("run mode=" + cfg.mode + " config-hash=" + config_hash(kv));
    for (const auto& line : res.summary) emit("  " + line);
    emit("exit=" + std::to_string(code));
    return code;
}

}  // namespace curvlab
