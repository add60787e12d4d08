#pragma once

#include "srg/model.hpp"
#include "srg/rgloop.hpp"
#include "srg/types.hpp"

#include <functional>
#include <vector>

namespace srg {

struct ContourSpec {
    Complex center;
    double radius = 0.02;
    int points = 16;

    Complex point(int j) const;
};

// Dense Hermitian diagonalization of the assembled Hamiltonian at real s.
struct GroundState {
    double e_min = 0.0;
    Vec vector;
};

GroundState direct_ground(const ModelSpec& spec, double s, const FockBasis& basis);

// Trapezoid loop integral of sampled f around the contour, and the magnitude
// normalized by contour length times max|f|.
struct LoopResult {
    Complex integral;
    double normalized = 0.0;
};

LoopResult cauchy_loop(const std::vector<Complex>& f_samples, const ContourSpec& contour);

struct AnalyticitySuite {
    double loop_z_infinity = 0.0;                  // normalized
    std::vector<double> loop_phi_coords;           // 5 coordinates of phi0
    std::vector<double> loop_psi_coords;           // 5 coordinates of psi
    double cauchy_riemann_residual = 0.0;          // |f_y - i f_x| at s0
    double cauchy_riemann_scale = 0.0;             // |f_x|
    double conj_symmetry = 0.0;                    // |z_inf(sbar) - conj(z_inf(s))|
    std::vector<Complex> z_on_contour;
    bool all_converged = true;
    int failed_point = -1;
};

AnalyticitySuite analyticity_suite(const ModelSpec& spec, const FockBasis& basis,
                                   const RGConfig& cfg, const ContourSpec& contour, int depth,
                                   int threads = 1);

// Finite-difference demo that an embedded non-degenerate ground state can fail
// to be analytic: H(s) = (-d^2/dx^2 + s 1_[-1,1]) (+) 0 on a line segment.
struct CounterexampleRow {
    double s;
    double e_min;
    double overlap_prev;  // |<psi(s_prev), psi(s)>|, 1.0 for the first row
};

std::vector<CounterexampleRow> counterexample_demo(const std::vector<double>& s_values,
                                                   double box = 40.0, double step = 0.05);

}  // namespace srg
