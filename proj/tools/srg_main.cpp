// Command-line driver: check hypotheses, run the renormalization chain,
// cross-check the Wick expansion, certify analyticity on a contour, and run
// the independent diagonalization oracle and the non-analyticity demo.

#include "srg/config.hpp"
#include "srg/reports.hpp"
#include "srg/verify.hpp"
#include "srg/wick.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace srg;

constexpr int kExitPass = 0;
constexpr int kExitScientificFailure = 1;
constexpr int kExitUsage = 2;

ParameterLedger make_ledger(const RunConfig& cfg, double alpha0, double gamma0) {
    LedgerConstants consts;
    if (cfg.polydisc_mode == "paper-locked") {
        consts = locked_constants(cfg.rho, cfg.c_chi);
    } else {
        consts.c_chi = cfg.c_chi;
        consts.c_beta = cfg.c_beta_emp;
        consts.c_gamma = cfg.c_gamma_emp;
        consts.xi = std::sqrt(cfg.rho) / (4.0 * cfg.c_chi);
    }
    return parameter_ledger(consts, cfg.rho, cfg.mu, alpha0, cfg.beta0_resolved(), gamma0,
                            cfg.n_steps);
}

int cmd_check(const RunConfig& cfg) {
    const ModelSpec spec = cfg.make_model();
    const ModeGrid grid = cfg.make_grid();
    const FockBasis basis = build_fock(grid, cfg.n_max);
    const HypothesisReport rep = hypothesis_report(spec, grid, basis, u_samples(spec));
    const ParameterLedger led = make_ledger(cfg, cfg.alpha0_resolved(), cfg.gamma0_resolved());
    write_json(cfg.out_dir + "/hypotheses.json", hypotheses_json(cfg, rep, led));
    if (!rep.pass) {
        std::cerr << "hypothesis check failed: " << rep.failure << "\n";
        return kExitScientificFailure;
    }
    if (!led.refusal.empty()) {
        std::cerr << "parameter ledger: " << led.refusal << "\n";
        return kExitScientificFailure;
    }
    std::cout << "check: all hypotheses pass\n";
    return kExitPass;
}

int cmd_run(const RunConfig& cfg, bool force) {
    ModelSpec spec = cfg.make_model();
    const ModeGrid grid = cfg.make_grid();
    const FockBasis basis = build_fock(grid, cfg.n_max);

    if (!force) {
        const HypothesisReport rep = hypothesis_report(spec, grid, basis, u_samples(spec));
        if (!rep.pass) {
            std::cerr << "hypothesis check failed (" << rep.failure << "); use --force to override\n";
            return kExitScientificFailure;
        }
    }

    double g_used = spec.g;
    if (cfg.calibrate) {
        CalibrationTargets targets{cfg.alpha0_resolved(), cfg.beta0_resolved(),
                                   cfg.gamma0_resolved(), 0.0, cfg.mu, cfg.rho};
        targets.xi = std::sqrt(cfg.rho) / (4.0 * cfg.c_chi);
        g_used = std::min(calibrate_g(spec, grid, basis, targets), cfg.g_cap);
        spec.g = g_used;
    }

    const Pipeline pipe = make_pipeline(spec, spec.s0, basis, cfg.make_rg());
    const RGTrace trace = run(pipe);
    const int depth = cfg.depth_resolved();
    const Chain chain = build_chain(pipe, trace.z_infinity, depth, true);
    const EigenvectorResult ev = eigenvector(pipe, chain, depth);
    const GapReport gap = gap_check(pipe, trace.z_infinity, cfg.n_steps);
    const HfLimitReport hf = hf_limit_check(pipe, chain);

    const ParameterLedger locked = parameter_ledger(
        locked_constants(cfg.rho, cfg.c_chi), cfg.rho, cfg.mu,
        std::abs(trace.levels.empty() ? Complex(0) : trace.levels[0].e), cfg.beta0_resolved(),
        cfg.gamma0_resolved(), cfg.n_steps);
    LedgerConstants emp;
    emp.c_chi = cfg.c_chi;
    emp.c_beta = trace.c_beta_emp > 0.0 ? trace.c_beta_emp : cfg.c_beta_emp;
    emp.c_gamma = trace.c_gamma_emp > 0.0 ? trace.c_gamma_emp : cfg.c_gamma_emp;
    emp.xi = std::sqrt(cfg.rho) / (4.0 * cfg.c_chi);
    const double gamma0_emp =
        trace.levels.empty() ? cfg.gamma0_resolved() : trace.levels[0].gamma_proxy / emp.xi;
    const ParameterLedger empirical =
        parameter_ledger(emp, cfg.rho, cfg.mu,
                         std::abs(trace.levels.empty() ? Complex(0) : trace.levels[0].e),
                         cfg.beta0_resolved(), gamma0_emp, cfg.n_steps);

    bool oracle_ran = false;
    double oracle_e = 0.0, mismatch = 0.0;
    if (cfg.oracle && std::abs(spec.s0) >= 0.0) {
        const GroundState gs = direct_ground(spec, spec.s0, basis);
        oracle_ran = true;
        oracle_e = gs.e_min;
        mismatch = std::abs(trace.z_infinity - gs.e_min);
    }

    write_json(cfg.out_dir + "/trace.json",
               trace_json(cfg, trace, ev, gap, hf, locked, empirical, g_used, oracle_e, mismatch,
                          oracle_ran));
    write_text(cfg.out_dir + "/levels.csv", levels_csv(trace));

    if (!trace.converged) {
        std::cerr << "run: zero finding did not converge\n";
        return kExitScientificFailure;
    }
    if (oracle_ran && mismatch > cfg.oracle_tol * (1.0 + std::abs(oracle_e))) {
        std::cerr << "run: z_infinity disagrees with the dense oracle: " << mismatch << "\n";
        return kExitScientificFailure;
    }
    std::cout << "run: z_infinity = " << trace.z_infinity.real();
    if (trace.z_infinity.imag() != 0.0) std::cout << " + " << trace.z_infinity.imag() << "i";
    std::cout << " (error bound " << trace.z_error_bound << ")\n";
    return kExitPass;
}

int cmd_wick(const RunConfig& cfg) {
    ModelSpec spec = cfg.make_model();
    const ModeGrid grid = build_grid(cfg.rho, cfg.wick_shells, cfg.wick_angular);
    const FockBasis basis = build_fock(grid, cfg.wick_n_max);
    const Complex s = spec.s0;
    Eigen::SelfAdjointEigenSolver<Mat> es(spec.h_at(spec.s0));
    const Complex z = es.eigenvalues()(0) - 0.1 * cfg.rho;

    const WickKernels kernels = assemble_w(spec, s, z, cfg.wick_l_max, basis);
    const WickCompare cmp = compare_with_direct(spec, s, z, cfg.wick_l_max, basis);
    const WickBoundReport bounds = bound_check(spec, {{s, z}}, cfg.wick_l_max, basis);

    write_json(cfg.out_dir + "/wick.json", wick_json(cfg, cmp, bounds, kernels));
    write_text(cfg.out_dir + "/kernels.csv", kernels_to_csv(kernels.seq, grid));

    if (spec.g > 0.0 && !cmp.ratio_ok) {
        std::cerr << "wick: residual ratio " << cmp.ratio << " outside the O(g^" << cfg.wick_l_max + 1
                  << ") window\n";
        return kExitScientificFailure;
    }
    if (!bounds.v1_ok || !bounds.a_bounds_ok) {
        std::cerr << "wick: kernel bound violated\n";
        return kExitScientificFailure;
    }
    std::cout << "wick: residual " << cmp.residual << ", ratio " << cmp.ratio << "\n";
    return kExitPass;
}

int cmd_analyticity(const RunConfig& cfg) {
    ModelSpec spec = cfg.make_model();
    const ModeGrid grid = cfg.make_grid();
    const FockBasis basis = build_fock(grid, cfg.n_max);
    if (cfg.calibrate) {
        CalibrationTargets targets{cfg.alpha0_resolved(), cfg.beta0_resolved(),
                                   cfg.gamma0_resolved(), std::sqrt(cfg.rho) / (4.0 * cfg.c_chi),
                                   cfg.mu, cfg.rho};
        spec.g = std::min(calibrate_g(spec, grid, basis, targets), cfg.g_cap);
    }
    ContourSpec contour;
    contour.center = spec.s0;
    contour.radius = cfg.contour_radius;
    contour.points = cfg.contour_points;
    const AnalyticitySuite suite = analyticity_suite(spec, basis, cfg.make_rg(), contour,
                                                     cfg.depth_resolved(), cfg.threads);
    write_json(cfg.out_dir + "/contour.json", contour_json(cfg, suite, contour));

    if (!suite.all_converged) {
        std::cerr << "analyticity: contour point " << suite.failed_point << " failed\n";
        return kExitScientificFailure;
    }
    double worst = suite.loop_z_infinity;
    for (double v : suite.loop_phi_coords) worst = std::max(worst, v);
    for (double v : suite.loop_psi_coords) worst = std::max(worst, v);
    if (worst > cfg.loop_tol || suite.conj_symmetry > 1e-10) {
        std::cerr << "analyticity: loop magnitude " << worst << " or conjugation residual "
                  << suite.conj_symmetry << " above tolerance\n";
        return kExitScientificFailure;
    }
    std::cout << "analyticity: worst loop " << worst << ", conjugation " << suite.conj_symmetry
              << "\n";
    return kExitPass;
}

int cmd_demo_counterexample(const RunConfig& cfg) {
    const auto rows = counterexample_demo(cfg.cx_s_values, cfg.cx_box, cfg.cx_step);
    write_text(cfg.out_dir + "/table.csv", counterexample_csv(rows));
    for (const auto& r : rows)
        std::cout << "s = " << r.s << "  E = " << r.e_min << "  overlap_prev = " << r.overlap_prev
                  << "\n";
    return kExitPass;
}

int cmd_oracle(const RunConfig& cfg) {
    const ModelSpec spec = cfg.make_model();
    const FockBasis basis = build_fock(cfg.make_grid(), cfg.n_max);
    const GroundState gs = direct_ground(spec, spec.s0, basis);

    bool compared = false, within = true;
    double mismatch = 0.0, zre = 0.0, zim = 0.0;
    std::ifstream tf(cfg.out_dir + "/trace.json");
    if (tf) {
        Json trace = Json::parse(tf, nullptr, false);
        if (!trace.is_discarded() && trace.contains("z_infinity")) {
            zre = trace["z_infinity"]["re"].get<double>();
            zim = trace["z_infinity"]["im"].get<double>();
            mismatch = std::abs(Complex(zre, zim) - Complex(gs.e_min, 0.0));
            within = mismatch <= cfg.oracle_tol * (1.0 + std::abs(gs.e_min));
            compared = true;
        }
    }
    write_json(cfg.out_dir + "/oracle.json",
               oracle_json(cfg, gs, compared, zre, zim, mismatch, within));
    if (compared && !within) {
        std::cerr << "oracle: trace z_infinity mismatch " << mismatch << " beyond tolerance\n";
        return kExitScientificFailure;
    }
    std::cout << "oracle: E_min = " << gs.e_min << (compared ? " (trace compared)" : "") << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral renormalization engine for matter-boson Hamiltonians"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int threads_override = 0;
    bool force = false;
    app.add_option("--config", config_path, "path to the run configuration")->required();
    app.add_option("--out", out_override, "output directory override");
    app.add_option("--threads", threads_override, "worker threads (default from config, 1)");
    app.add_flag("--force", force, "skip the hypothesis gate before run");

    auto* sub_check = app.add_subcommand("check", "verify model hypotheses and the parameter ledger");
    auto* sub_run = app.add_subcommand("run", "full renormalization run with certificates");
    auto* sub_wick = app.add_subcommand("wick", "kernel expansion against the direct effective Hamiltonian");
    auto* sub_analyticity = app.add_subcommand("analyticity", "Cauchy-loop certification on a contour");
    auto* sub_demo = app.add_subcommand("demo-counterexample", "non-analytic embedded eigenvalue demo");
    auto* sub_oracle = app.add_subcommand("oracle", "dense diagonalization ground state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    srg::RunConfig cfg;
    try {
        cfg = srg::load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (threads_override > 0) cfg.threads = threads_override;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (sub_check->parsed()) return cmd_check(cfg);
        if (sub_run->parsed()) return cmd_run(cfg, force);
        if (sub_wick->parsed()) return cmd_wick(cfg);
        if (sub_analyticity->parsed()) return cmd_analyticity(cfg);
        if (sub_demo->parsed()) return cmd_demo_counterexample(cfg);
        if (sub_oracle->parsed()) return cmd_oracle(cfg);
    } catch (const srg::SrgError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitScientificFailure;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitScientificFailure;
    }
    return kExitUsage;
}
