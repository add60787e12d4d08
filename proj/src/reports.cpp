#include "srg/reports.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace srg {

Json meta_block() {
    Json m;
    m["generator"] = "srg 1.0.0";
    const auto now = std::chrono::system_clock::now();
    m["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return m;
}

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json config_json(const RunConfig& c) {
    Json j;
    j["model"] = c.model;
    j["model.g"] = c.g;
    j["model.mu"] = c.mu;
    j["model.s0"] = c.s0;
    j["model.g0_exponent"] = c.g0_exponent;
    j["model.uv_cutoff"] = c.uv_cutoff;
    j["model.u_radius_s"] = c.u_radius_s;
    j["model.u_radius_z"] = c.u_radius_z_resolved();
    j["grid.rho"] = c.rho;
    j["grid.shells"] = c.shells;
    j["grid.angular"] = c.angular;
    j["fock.n_max"] = c.n_max;
    j["rg.n_steps"] = c.n_steps;
    j["rg.u_threshold"] = c.u_threshold > 0.0 ? c.u_threshold : c.rho / 2.0;
    j["rg.zero_tol"] = c.zero_tol;
    j["rg.newton_max"] = c.newton_max;
    j["rg.leak_bound"] = c.leak_bound;
    j["polydisc.mode"] = c.polydisc_mode;
    j["polydisc.alpha0"] = c.alpha0_resolved();
    j["polydisc.beta0"] = c.beta0_resolved();
    j["polydisc.gamma0"] = c.gamma0_resolved();
    j["polydisc.c_chi"] = c.c_chi;
    j["polydisc.c_beta_emp"] = c.c_beta_emp;
    j["polydisc.c_gamma_emp"] = c.c_gamma_emp;
    j["calibrate.enabled"] = c.calibrate;
    j["calibrate.g_cap"] = c.g_cap;
    j["verify.contour_radius"] = c.contour_radius;
    j["verify.contour_points"] = c.contour_points;
    j["verify.oracle"] = c.oracle;
    j["verify.oracle_tol"] = c.oracle_tol;
    j["verify.loop_tol"] = c.loop_tol;
    j["verify.depth"] = c.depth_resolved();
    j["wick.l_max"] = c.wick_l_max;
    j["wick.shells"] = c.wick_shells;
    j["wick.angular"] = c.wick_angular;
    j["wick.n_max"] = c.wick_n_max;
    j["output.dir"] = c.out_dir;
    j["threads"] = c.threads;
    return j;
}

Json ledger_json(const ParameterLedger& led) {
    Json j;
    j["c_chi"] = led.constants.c_chi;
    j["c_beta"] = led.constants.c_beta;
    j["c_gamma"] = led.constants.c_gamma;
    j["xi"] = led.constants.xi;
    j["rho"] = led.rho;
    j["mu"] = led.mu;
    j["contractive"] = led.contractive;
    j["admissible"] = led.admissible;
    j["refusal"] = led.refusal;
    j["alpha"] = led.alpha;
    j["beta"] = led.beta;
    j["gamma"] = led.gamma;
    j["epsilon"] = led.epsilon;
    j["z_convergence_constant"] = led.z_convergence_constant;
    return j;
}

Json hypotheses_json(const RunConfig& cfg, const HypothesisReport& rep,
                     const ParameterLedger& ledger) {
    Json j;
    j["meta"] = meta_block();
    j["config"] = config_json(cfg);
    j["hypothesis_1"] = {{"sup_norm_mu_sq", rep.sup_norm_mu_sq},
                         {"sup_norm_omega_sq", rep.sup_norm_omega_sq},
                         {"shell_ratio", rep.shell_ratio},
                         {"pass", rep.hyp1_pass}};
    j["hypothesis_2"] = {{"gap", rep.gap}, {"pass", rep.hyp2_pass}};
    j["hypothesis_3"] = {{"sup_e_dist", rep.sup_e_dist},
                         {"sup_q_resolvent", rep.sup_q_resolvent},
                         {"pass", rep.hyp3_pass}};
    j["resolvent_sups"] = {{"hf_weighted", rep.lem8_hf},
                           {"w_right", rep.lem8_w_right},
                           {"w_left", rep.lem8_w_left}};
    j["ledger"] = ledger_json(ledger);
    j["pass"] = rep.pass && (ledger.refusal.empty());
    j["failure"] = rep.failure;
    return j;
}

namespace {

Json condition_json(const ConditionReport& c) {
    return Json{{"commutator_chi", c.commutator_chi},
                {"commutator_chibar", c.commutator_chibar},
                {"sigma_min_support", c.sigma_min_support},
                {"neumann_left", c.neumann_left},
                {"neumann_right", c.neumann_right},
                {"cross_norm", c.cross_norm},
                {"pass", c.pass}};
}

}  // namespace

Json trace_json(const RunConfig& cfg, const RGTrace& trace, const EigenvectorResult& ev,
                const GapReport& gap, const HfLimitReport& hf, const ParameterLedger& locked,
                const ParameterLedger& empirical, double g_used, double oracle_e,
                double oracle_gap_value, bool oracle_ran) {
    Json j;
    j["meta"] = meta_block();
    j["config"] = config_json(cfg);
    j["g_used"] = g_used;
    j["z_infinity"] = complex_json(trace.z_infinity);
    j["z_error_bound"] = trace.z_error_bound;
    j["converged"] = trace.converged;
    j["c_beta_emp"] = trace.c_beta_emp;
    j["c_gamma_emp"] = trace.c_gamma_emp;
    Json levels = Json::array();
    for (size_t n = 0; n < trace.levels.size(); ++n) {
        const auto& r = trace.levels[n];
        Json lv;
        lv["n"] = n;
        lv["z"] = n < trace.z.size() ? complex_json(trace.z[n]) : Json();
        lv["e_at_z_infinity"] = complex_json(r.e);
        lv["gamma_proxy"] = r.gamma_proxy;
        lv["leakage"] = r.leakage;
        lv["e_recursion_residual"] = r.e_recursion_residual;
        lv["u_ok"] = r.u_ok;
        lv["pair"] = condition_json(r.pair);
        levels.push_back(lv);
    }
    j["levels"] = levels;
    j["eigenvector"] = {{"residual_h0", ev.residual_h0},
                        {"residual_full", ev.residual_full},
                        {"norm_phi0", ev.norm_phi0},
                        {"increments", ev.increments},
                        {"tail_constant", ev.tail_constant},
                        {"tail_bound", ev.tail_bound},
                        {"gamma_star_leak", ev.gamma_star_leak},
                        {"low_norm_flag", ev.low_norm_flag}};
    j["gap"] = {{"x", gap.x},
                {"sigma_min_h0", gap.sigma_min_h0},
                {"window_clear", gap.window_clear},
                {"monotone", gap.monotone},
                {"spot_lambda_min", gap.spot_lambda_min},
                {"spot_lower_bound", gap.spot_lower_bound},
                {"spot_ok", gap.spot_ok}};
    j["hf_limit"] = {{"lambda", hf.lambda}, {"residual", hf.residual}, {"cauchy", hf.cauchy}};
    j["ledger_locked"] = ledger_json(locked);
    j["ledger_empirical"] = ledger_json(empirical);
    if (oracle_ran) {
        j["oracle"] = {{"e_min", oracle_e},
                       {"mismatch", oracle_gap_value},
                       {"ran", true}};
    } else {
        j["oracle"] = {{"ran", false}};
    }
    return j;
}

Json wick_json(const RunConfig& cfg, const WickCompare& cmp, const WickBoundReport& bounds,
               const WickKernels& kernels) {
    Json j;
    j["meta"] = meta_block();
    j["config"] = config_json(cfg);
    j["compare"] = {{"residual", cmp.residual},
                    {"residual_half_g", cmp.residual_half},
                    {"ratio", cmp.ratio},
                    {"expected_ratio", cmp.expected_ratio},
                    {"ratio_ok", cmp.ratio_ok}};
    j["bounds"] = {{"c0", bounds.bounds.c0},
                   {"c1", bounds.bounds.c1},
                   {"g_omega", bounds.bounds.g_omega},
                   {"g_mu", bounds.bounds.g_mu},
                   {"c_at", bounds.bounds.c_at},
                   {"chi1_prime_sup", bounds.bounds.chi1_prime_sup},
                   {"v_checked", bounds.v_checked},
                   {"worst_v1_margin", bounds.worst_v1_margin},
                   {"v1_ok", bounds.v1_ok},
                   {"worst_v2_margin", bounds.worst_v2_margin},
                   {"v2_ok", bounds.v2_ok},
                   {"a_create_norm", bounds.a_create_norm},
                   {"a_create_bound", bounds.a_create_bound},
                   {"a_annihilate_norm", bounds.a_annihilate_norm},
                   {"a_annihilate_bound", bounds.a_annihilate_bound},
                   {"a_bounds_ok", bounds.a_bounds_ok}};
    j["kernels"] = {{"l_max", kernels.l_max},
                    {"e_at", complex_json(kernels.e_at)},
                    {"v_count", kernels.v_count},
                    {"max_v_ratio", kernels.max_v_ratio},
                    {"r_samples", kernels.seq.r_grid.size()}};
    return j;
}

Json contour_json(const RunConfig& cfg, const AnalyticitySuite& suite, const ContourSpec& contour) {
    Json j;
    j["meta"] = meta_block();
    j["config"] = config_json(cfg);
    j["contour"] = {{"center", complex_json(contour.center)},
                    {"radius", contour.radius},
                    {"points", contour.points}};
    j["loop_z_infinity"] = suite.loop_z_infinity;
    j["loop_phi_coords"] = suite.loop_phi_coords;
    j["loop_psi_coords"] = suite.loop_psi_coords;
    j["cauchy_riemann_residual"] = suite.cauchy_riemann_residual;
    j["cauchy_riemann_scale"] = suite.cauchy_riemann_scale;
    j["conj_symmetry"] = suite.conj_symmetry;
    j["all_converged"] = suite.all_converged;
    j["failed_point"] = suite.failed_point;
    Json zs = Json::array();
    for (const auto& z : suite.z_on_contour) zs.push_back(complex_json(z));
    j["z_on_contour"] = zs;
    return j;
}

Json oracle_json(const RunConfig& cfg, const GroundState& gs, bool compared, double z_re,
                 double z_im, double mismatch, bool within_tol) {
    Json j;
    j["meta"] = meta_block();
    j["config"] = config_json(cfg);
    j["e_min"] = gs.e_min;
    j["compared_with_trace"] = compared;
    if (compared) {
        j["trace_z_infinity"] = {{"re", z_re}, {"im", z_im}};
        j["mismatch"] = mismatch;
        j["within_tol"] = within_tol;
    }
    return j;
}

std::string levels_csv(const RGTrace& trace) {
    std::ostringstream os;
    os.precision(17);
    os << "level,re_z,im_z,re_E,im_E\n";
    for (size_t n = 0; n < trace.zero_samples.size(); ++n)
        for (const auto& [z, e] : trace.zero_samples[n])
            os << n << "," << z.real() << "," << z.imag() << "," << e.real() << "," << e.imag()
               << "\n";
    return os.str();
}

std::string counterexample_csv(const std::vector<CounterexampleRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "s,e_min,overlap_prev\n";
    for (const auto& r : rows) os << r.s << "," << r.e_min << "," << r.overlap_prev << "\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw SrgError("cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace srg
