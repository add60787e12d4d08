#pragma once

#include "srg/kernels.hpp"
#include "srg/model.hpp"
#include "srg/types.hpp"

#include <optional>
#include <vector>

namespace srg {

struct RGConfig {
    double rho = 0.25;
    int n_steps = 6;
    double u_threshold = 0.0;  // 0 -> rho/2
    double zero_tol = 1e-12;
    int newton_max = 50;
    double leak_bound = 1e-6;
    PolydiscParams polydisc;

    double threshold() const { return u_threshold > 0.0 ? u_threshold : rho / 2.0; }
};

// One RG chain: model at fixed s, grid-backed Fock basis, reduced space
// bookkeeping and the shell-shift index map for Gamma_rho on H_red.
struct Pipeline {
    ModelSpec spec;
    Complex s;
    FockBasis basis;
    RGConfig cfg;
    std::vector<Index> red;
    RVec hf_red;
    std::vector<Index> down;  // red position -> red position of the shell-shifted state, -1 on the deepest shell
    Complex e_at;             // tracked atomic eigenvalue at s

    Index dim() const { return static_cast<Index>(red.size()); }
};

Pipeline make_pipeline(const ModelSpec& spec, Complex s, const FockBasis& basis,
                       const RGConfig& cfg);

// One renormalization step rho^-1 Gamma F_{chi_rho}(H, w00(H_f)) Gamma^*.
// The diagonal kernel transports as an exact function image w00(rho * H_f);
// the coupling part is carried by the shell permutation, and whatever of it
// falls outside the permutation's range is dropped and reported as leakage.
struct StepResult {
    Mat h_next;
    Mat q;  // Q of the level's Feshbach pair, for eigenvector assembly
    DiagonalExtraction ext;  // extraction of the *input* level
    ConditionReport pair;
    double leakage = 0.0;
};

StepResult renorm_step(const Mat& h, const Pipeline& pipe);

Complex e_of_z(const Mat& h);

struct LevelRecord {
    Complex e;               // E^(n)(z)
    double gamma_proxy = 0.0;
    double leakage = 0.0;
    double e_recursion_residual = 0.0;  // |E^(n) - E^(n-1)/rho|, 0 at level 0
    bool u_ok = true;
    ConditionReport pair;
};

struct Chain {
    InitialReduction init;
    std::vector<Mat> h;    // levels 0..n
    std::vector<Mat> q;    // Q_0..Q_n when cached
    std::vector<LevelRecord> rec;
    Complex z;
};

Chain build_chain(const Pipeline& pipe, Complex z, int n_levels, bool cache_q = false);

// E^(n)(z), recomputed from H^(0)[s,z] through n renormalization steps.
Complex level_function(const Pipeline& pipe, int n, Complex z,
                       std::vector<int>* u_violations = nullptr);

struct ZeroResult {
    Complex z;
    Complex e;
    int iterations = 0;
    bool converged = false;
    std::vector<std::pair<Complex, Complex>> samples;  // (z, E) along the search
};

ZeroResult find_zero(const Pipeline& pipe, int n, Complex z_start);

struct RGTrace {
    std::vector<Complex> z;  // z_0..z_n
    std::vector<std::vector<std::pair<Complex, Complex>>> zero_samples;
    std::vector<LevelRecord> levels;  // diagnostics of the final chain at z_infinity
    Complex z_infinity;
    double z_error_bound = 0.0;       // ledger bound rho^n exp(sum alpha/(2 rho eps^2))
    double c_beta_emp = 0.0;          // fitted from the trace
    double c_gamma_emp = 0.0;
    bool converged = true;
};

RGTrace run(const Pipeline& pipe);

struct EigenvectorResult {
    Vec phi0;    // on H_red
    Vec psi;     // on atom (x) Fock
    double residual_h0 = 0.0;    // ||H^(0)[z_inf] phi0|| / ||phi0||
    double residual_full = 0.0;  // ||(H_g(s) - z_inf) psi|| / ||psi||
    double norm_phi0 = 0.0;
    std::vector<double> increments;  // ||phi_{0,l} - phi_{0,l-1}||
    double tail_constant = 0.0;      // the Step-1 constant from (rho, xi, sum gamma)
    double tail_bound = 0.0;         // C * sum_{l>depth} gamma_l
    double gamma_star_leak = 0.0;    // norm lost to the deepest shell while chaining
    bool low_norm_flag = false;      // ||phi0|| < 0.5
};

EigenvectorResult eigenvector(const Pipeline& pipe, const Chain& chain, int depth);

struct GapReport {
    std::vector<double> x;
    std::vector<double> sigma_min_h0;
    bool window_clear = false;
    // per level: five real sample points with finite-difference dE/dx < 0
    std::vector<std::vector<double>> mono_x;
    std::vector<std::vector<double>> mono_derivative;
    bool monotone = false;
    // eq-lowerbound spot check: lambda_min(H^(n)[x]) >= E^(n)(x) - gamma_proxy_n
    double spot_lambda_min = 0.0;
    double spot_lower_bound = 0.0;
    bool spot_ok = false;
};

GapReport gap_check(const Pipeline& pipe, Complex z_infinity, int n_levels);

struct HfLimitReport {
    std::vector<double> lambda;     // Frobenius fit per level (real part; imag ~ 0)
    std::vector<double> residual;   // min_l ||H^(n) - l H_f||_F
    std::vector<double> cauchy;     // |lambda_{n+1} - lambda_n|
};

HfLimitReport hf_limit_check(const Pipeline& pipe, const Chain& chain);

}  // namespace srg
