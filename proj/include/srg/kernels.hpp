#pragma once

#include "srg/feshbach.hpp"
#include "srg/fock.hpp"
#include "srg/types.hpp"

#include <map>
#include <utility>
#include <vector>

namespace srg {

// Sampled kernel sequence w = (w_{m,n}) with m+n <= 2.  w_{0,0} lives on
// r_grid (the H_f spectral variable); higher kernels carry one value per
// (r-sample, mode tuple).  Derivative samples feed the C^1 norm.
struct KernelSequence {
    std::vector<double> r_grid;
    std::vector<Complex> w00;
    std::vector<Complex> w00_deriv;
    // (m,n) -> values indexed by [r][flattened mode tuple]; tuple index is
    // mode_1 * M^(m+n-1) + ... row-major over creation then annihilation slots.
    std::map<std::pair<int, int>, std::vector<std::vector<Complex>>> wmn;
    std::map<std::pair<int, int>, std::vector<std::vector<Complex>>> wmn_deriv;
    double xi = 0.5;
    double mu = 0.5;

    Complex w00_at(double r) const;  // linear interpolation on r_grid
};

struct PolydiscParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double rho = 0.25;
    double xi = 0.0;  // 0 means "derive from rho and c_chi"
    double mu = 0.5;
    double c_chi = 1.0;

    double xi_locked() const;  // sqrt(rho)/(4 c_chi)
};

Mat op_from_kernels(const KernelSequence& w, const FockBasis& basis);

double norm_mu(const KernelSequence& w, const ModeGrid& grid, int m, int n);
double norm_mu_xi(const KernelSequence& w, const ModeGrid& grid);

// Reads the diagonal kernel w_{0,0} off a matrix on H_red.  The vacuum entry
// gives w_{0,0}(0); each one-boson diagonal carries w_{0,0}(r_j) plus the
// quadrature-weighted w_{1,1}(0,k,k), which is estimated from the same-shell
// angular off-diagonals (w_{1,1} is continuous in its mode arguments, and
// same-shell modes share |k|) and subtracted.  Needs angular >= 2.
struct DiagonalExtraction {
    std::vector<double> r_grid;      // 0 and the shell radii, ascending
    std::vector<Complex> w00;
    std::vector<Complex> w00_deriv;  // finite differences across samples
    double offdiag_gamma_proxy = 0.0;  // ||H - w00(H_f)|| on H_red

    Complex w00_at(double r) const;
};

DiagonalExtraction extract_diag(const Mat& h_red, const FockBasis& basis,
                                const std::vector<Index>& red);

struct PolydiscReport {
    Complex w00_zero;
    double alpha_value = 0.0;  // |w00(0) - expected_e|
    double beta_value = 0.0;   // max |dw00/dr - 1|
    double gamma_proxy = 0.0;  // ||H - w00(H_f)||
    double gamma_bound = 0.0;  // xi * gamma
    bool alpha_ok = false, beta_ok = false, gamma_ok = false;
    ConditionReport pair;      // Feshbach-pair verdict for (H, w00(H_f)) at scale rho
    bool member = false;
};

PolydiscReport polydisc_check(const Mat& h_red, Complex expected_e, const PolydiscParams& p,
                              const FockBasis& basis, const std::vector<Index>& red);

// Predicted (alpha_n, beta_n, gamma_n) sequences and admissibility verdicts
// for the contraction ledger, either with the locked constants
// C_beta = 3/2 C_chi, C_gamma = 128 C_chi^2 or with supplied empirical ones.
struct LedgerConstants {
    double c_chi = 1.0;
    double c_beta = 1.5;
    double c_gamma = 128.0;
    double xi = 0.125;
};

LedgerConstants locked_constants(double rho, double c_chi);

struct ParameterLedger {
    LedgerConstants constants;
    double rho = 0.0, mu = 0.0;
    std::vector<double> alpha, beta, gamma;  // index n = 0..n_steps
    bool contractive = false;       // C_gamma rho^mu < 1
    bool beta0_ok = false, gamma0_ok = false, sum_condition_ok = false;
    bool alpha0_ok = false, rho_ok = false;
    bool admissible = false;
    double epsilon = 0.0;           // 1/2 - rho/2 - alpha_1
    double z_convergence_constant = 0.0;  // exp(sum alpha_k / (2 rho eps^2))
    std::string refusal;            // empty when the iteration is contractive
};

ParameterLedger parameter_ledger(const LedgerConstants& c, double rho, double mu, double alpha0,
                                 double beta0, double gamma0, int n_steps);

// Kernel dump rows: m,n,r,k1,k2,re,im (k fields 0 when absent).
std::string kernels_to_csv(const KernelSequence& w, const ModeGrid& grid);

}  // namespace srg
