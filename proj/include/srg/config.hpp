#pragma once

#include "srg/model.hpp"
#include "srg/rgloop.hpp"
#include "srg/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace srg {

// Flat key = value run configuration; see configs/spin_boson.cfg for the
// documented key set.
struct RunConfig {
    // model
    std::string model = "spin_boson";
    double g = 0.01;
    double mu = 0.5;
    double s0 = 0.1;
    double g0_exponent = 0.5;
    double uv_cutoff = 1.0;
    double u_radius_s = 0.05;
    double u_radius_z = 0.0;  // 0 -> rho
    int atom_dim = 2;
    std::vector<Mat> h_at_coeffs;  // dipole_toy only
    Mat d_matrix;                  // dipole_toy only

    // grid / fock
    double rho = 0.25;
    int shells = 8;
    int angular = 2;
    int n_max = 2;

    // rg
    int n_steps = 6;
    double u_threshold = 0.0;
    double zero_tol = 1e-12;
    int newton_max = 50;
    double leak_bound = 1e-6;

    // polydisc / ledger
    std::string polydisc_mode = "empirical";  // or "paper-locked"
    double alpha0 = 0.0;                      // 0 -> rho/2
    double beta0 = 0.0;                       // 0 -> rho/8
    double gamma0 = 0.0;                      // 0 -> rho/8
    double c_chi = 1.0;
    double c_beta_emp = 1.5;
    double c_gamma_emp = 1.0;

    // calibration
    bool calibrate = true;
    double g_cap = 0.02;

    // verify
    double contour_radius = 0.02;
    int contour_points = 16;
    bool oracle = true;
    double oracle_tol = 1e-8;
    double loop_tol = 1e-6;
    int depth = 0;  // 0 -> n_steps

    // wick
    int wick_l_max = 2;
    int wick_shells = 6;
    int wick_angular = 2;
    int wick_n_max = 3;

    // counterexample
    std::vector<double> cx_s_values = {-0.5, -0.25, -0.1, -0.01, 0.01, 0.1, 0.25, 0.5};
    double cx_box = 40.0;
    double cx_step = 0.05;

    // output
    std::string out_dir = "out";
    int threads = 1;

    double alpha0_resolved() const { return alpha0 > 0.0 ? alpha0 : rho / 2.0; }
    double beta0_resolved() const { return beta0 > 0.0 ? beta0 : rho / 8.0; }
    double gamma0_resolved() const { return gamma0 > 0.0 ? gamma0 : rho / 8.0; }
    double u_radius_z_resolved() const { return u_radius_z > 0.0 ? u_radius_z : rho; }
    int depth_resolved() const { return depth > 0 ? depth : n_steps; }

    ModelSpec make_model() const;
    ModeGrid make_grid() const;
    RGConfig make_rg() const;
    void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

Complex parse_complex(const std::string& token);
Mat parse_matrix(const std::string& text);  // rows ';'-separated, entries whitespace-separated

}  // namespace srg
