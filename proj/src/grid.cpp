#include "srg/grid.hpp"

#include <cmath>

namespace srg {

namespace {
constexpr double kPi = 3.14159265358979323846;

double ball_volume(double r) { return 4.0 / 3.0 * kPi * r * r * r; }
}  // namespace

ModeGrid build_grid(double rho, int shells, int angular_nodes, int max_modes) {
    if (!(rho > 0.0 && rho < 1.0)) throw SrgError("build_grid: rho must lie in (0,1)");
    if (shells < 2) throw SrgError("build_grid: need at least 2 shells");
    if (angular_nodes < 1) throw SrgError("build_grid: need at least 1 angular node");
    if (shells * angular_nodes > max_modes)
        throw SrgError("build_grid: shells*angular_nodes exceeds mode budget");

    ModeGrid g;
    g.rho = rho;
    g.shells = shells;
    g.angular = angular_nodes;
    g.modes.reserve(static_cast<size_t>(shells) * angular_nodes);

    const double sq = std::sqrt(rho);
    for (int j = 0; j < shells; ++j) {
        const double r = std::pow(rho, j);
        const double hi = (j == 0) ? 1.0 : r / sq;    // rho^{j-1/2}, clipped at 1
        const double lo = (j == shells - 1) ? 0.0 : r * sq;  // deepest cell reaches 0
        const double cell = ball_volume(hi) - ball_volume(lo);
        for (int a = 0; a < angular_nodes; ++a)
            g.modes.push_back({j, a, r, cell / angular_nodes});
    }
    return g;
}

double grid_norm_omega_sq(const ModeGrid& grid, const std::vector<double>& abs_values) {
    if (abs_values.size() != grid.modes.size())
        throw SrgError("grid_norm_omega_sq: one value per mode required");
    double s = 0.0;
    for (size_t m = 0; m < grid.modes.size(); ++m) {
        const auto& md = grid.modes[m];
        s += md.weight * abs_values[m] * abs_values[m] * (1.0 / md.k + 1.0);
    }
    return s;
}

double grid_norm_mu_sq(const ModeGrid& grid, const std::vector<double>& abs_values, double mu) {
    if (abs_values.size() != grid.modes.size())
        throw SrgError("grid_norm_mu_sq: one value per mode required");
    double s = 0.0;
    for (size_t m = 0; m < grid.modes.size(); ++m) {
        const auto& md = grid.modes[m];
        s += md.weight * abs_values[m] * abs_values[m] / std::pow(md.k, 2.0 + 2.0 * mu);
    }
    return s;
}

}  // namespace srg
