#pragma once

#include "srg/types.hpp"

#include <vector>

namespace srg {

// Scaling-adapted discretization of the unit momentum ball.  Radial nodes sit
// at r_j = rho^j so the dilation k -> rho*k is an exact shell permutation;
// each shell carries the momentum volume of the radial cell
// [rho^{j+1/2}, rho^{j-1/2}] (clipped to [0,1], deepest shell absorbs the
// rest of the ball) split evenly over the angular labels.
struct ModeGrid {
    double rho = 0.0;
    int shells = 0;
    int angular = 0;

    struct Mode {
        int shell;
        int ang;
        double k;       // |k| = rho^shell
        double weight;  // quadrature weight, momentum-volume units
    };
    std::vector<Mode> modes;  // flat, ordered by (shell, ang)

    int mode_count() const { return static_cast<int>(modes.size()); }
    double radius(int shell) const { return modes[static_cast<size_t>(shell) * angular].k; }
};

ModeGrid build_grid(double rho, int shells, int angular_nodes, int max_modes = 64);

// Discrete L2-type pairings over the grid, values given per mode.
// norm_omega^2 = sum w |v|^2 (1/|k| + 1),  norm_mu^2 = sum w |v|^2 / |k|^{2+2mu}.
double grid_norm_omega_sq(const ModeGrid& grid, const std::vector<double>& abs_values);
double grid_norm_mu_sq(const ModeGrid& grid, const std::vector<double>& abs_values, double mu);

}  // namespace srg
