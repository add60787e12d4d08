#pragma once

#include "srg/feshbach.hpp"
#include "srg/fock.hpp"
#include "srg/types.hpp"

#include <string>
#include <vector>

namespace srg {

// Analytic matter-boson family H_g(s) = H_at(s) (x) 1 + 1 (x) H_f + g W(s)
// with H_at(s) a matrix polynomial in s and coupling kernel
// G_s(k) = s * |k|^{g0_exponent} * D below the UV cutoff.
struct ModelSpec {
    std::string name = "spin_boson";
    std::vector<Mat> h_at_coeffs;  // A_p, all Hermitian; H_at(s) = sum A_p s^p
    Mat d_matrix;                  // atom factor of the coupling
    double g0_exponent = 0.5;
    double uv_cutoff = 1.0;
    double g = 0.0;
    double mu = 0.5;
    double s0 = 0.0;
    double u_radius_s = 0.05;       // product-disc neighborhood U
    double u_radius_z = 0.25;       // defaults to rho at config level

    Index atom_dim() const { return h_at_coeffs.empty() ? 0 : h_at_coeffs[0].rows(); }
    Mat h_at(Complex s) const;
    Mat coupling(Complex s, double k) const;  // G_s(k)

    void validate() const;  // Hermitian coefficients, square D
};

ModelSpec spin_boson_spec(double g, double s0 = 0.1);
ModelSpec dipole_toy_spec(const std::vector<Mat>& h_at_coeffs, const Mat& d, double g, double s0);

struct AtomicData {
    Complex e_at;
    Mat p_at;          // rank-one spectral projection, generally non-Hermitian
    double gap = 0.0;  // separation of E_at(s0) from the rest of the spectrum
    Vec left_vector;   // <left|right> = 1
    Vec right_vector;
    // eigenframe of H_at(s): columns of v are right eigenvectors, tracked
    // eigenvalue first; v_inv rows are the matching left eigenvectors
    Mat v, v_inv;
    Vec eigs;
};

AtomicData atomic_projection(const ModelSpec& spec, Complex s);

// a^*(G) on the tensor space for matrix-valued per-mode amplitudes.
Mat tensor_creation(const FockBasis& basis, const std::vector<Mat>& atom_values);

Mat assemble_H(const ModelSpec& spec, Complex s, const FockBasis& basis);

// First Feshbach reduction of H_g(s) - z with bold chi = P_at (x) chi_1,
// performed in the atomic eigenframe where the cutoff pair is diagonal.
// h0 is H^(0)[s,z] on H_red; the remaining members feed the eigenvector lift
// psi = Q_boldchi (phi_at (x) phi0).
struct InitialReduction {
    Mat h0;           // on H_red
    Mat q_frame;      // Q_boldchi in the eigenframe, on the full tensor space
    AtomicData atom;
    ConditionReport pair;
};

InitialReduction initial_effective(const ModelSpec& spec, Complex s, Complex z,
                                   const FockBasis& basis);

struct HypothesisReport {
    double sup_norm_mu_sq = 0.0;     // Hyp 1 integrand, discrete
    double sup_norm_omega_sq = 0.0;
    double shell_ratio = 0.0;        // per-shell contribution ratio; >= 1 means IR divergence
    bool hyp1_pass = false;
    double gap = 0.0;
    bool hyp2_pass = false;
    double sup_e_dist = 0.0;         // sup |E_at(s) - z| over samples
    double sup_q_resolvent = 0.0;    // sup (q+1)/(H_at - z + q) Pbar over samples and q-grid
    bool hyp3_pass = false;
    double lem8_hf = 0.0;            // ||(H_f+1)(H_0 - z)^-1 boldchibar||
    double lem8_w_right = 0.0;       // ||W (H_0 - z)^-1 boldchibar||
    double lem8_w_left = 0.0;        // ||(H_0 - z)^-1 boldchibar W||
    bool pass = false;
    std::string failure;             // names the first failed hypothesis
};

HypothesisReport hypothesis_report(const ModelSpec& spec, const ModeGrid& grid,
                                   const FockBasis& basis,
                                   const std::vector<std::pair<Complex, Complex>>& samples);

// Default (s,z) sample set on the product disc U.
std::vector<std::pair<Complex, Complex>> u_samples(const ModelSpec& spec);

struct CalibrationTargets {
    double alpha0, beta0, gamma0, xi, mu, rho;
};

// Largest g on the bisection lattice for which the initial effective
// Hamiltonian stays in B(alpha0,beta0,gamma0) over the U samples.
double calibrate_g(const ModelSpec& spec, const ModeGrid& grid, const FockBasis& basis,
                   const CalibrationTargets& targets, double g_hi = 0.5);

}  // namespace srg
