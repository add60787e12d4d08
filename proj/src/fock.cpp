#include "srg/fock.hpp"

#include <algorithm>
#include <cmath>

namespace srg {

namespace {

// All occupation vectors with exactly n bosons over m modes, lexicographic.
void enumerate_sector(int m, int n, std::vector<int>& occ, int mode, std::vector<std::vector<int>>& out) {
    if (mode == m - 1) {
        occ[mode] = n;
        out.push_back(occ);
        return;
    }
    for (int c = 0; c <= n; ++c) {
        occ[mode] = c;
        enumerate_sector(m, n - c, occ, mode + 1, out);
    }
}

}  // namespace

std::vector<Index> FockBasis::reduced_indices() const {
    std::vector<Index> red;
    for (Index i = 0; i < dim(); ++i)
        if (hf[i] <= 1.0 + 1e-12) red.push_back(i);
    return red;
}

FockBasis build_fock(const ModeGrid& grid, int n_max, Index dim_cap) {
    if (n_max < 1) throw SrgError("build_fock: n_max must be >= 1");
    const int m = grid.mode_count();

    // dimension = sum_{n<=n_max} C(m+n-1, n), checked against the cap first
    double dim_est = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        double c = 1.0;
        for (int i = 0; i < n; ++i) c *= static_cast<double>(m + i) / (i + 1);
        dim_est += c;
    }
    if (dim_est > static_cast<double>(dim_cap))
        throw SrgError("build_fock: basis dimension exceeds configured cap");

    FockBasis b;
    b.grid = grid;
    b.n_max = n_max;
    std::vector<int> occ(m, 0);
    for (int n = 0; n <= n_max; ++n) enumerate_sector(m, n, occ, 0, b.states);

    b.hf.resize(b.states.size());
    for (size_t i = 0; i < b.states.size(); ++i) {
        double e = 0.0;
        for (int mm = 0; mm < m; ++mm) e += b.states[i][mm] * grid.modes[mm].k;
        b.hf[i] = e;
        b.index[b.states[i]] = static_cast<Index>(i);
    }
    return b;
}

Mat creation_op(const FockBasis& basis, int mode) {
    if (mode < 0 || mode >= basis.grid.mode_count()) throw SrgError("creation_op: mode out of range");
    Mat a = Mat::Zero(basis.dim(), basis.dim());
    std::vector<int> target;
    for (Index i = 0; i < basis.dim(); ++i) {
        target = basis.states[i];
        target[mode] += 1;
        auto it = basis.index.find(target);
        if (it == basis.index.end()) continue;  // beyond n_max: dropped
        a(it->second, i) = std::sqrt(static_cast<double>(target[mode]));
    }
    return a;
}

Mat annihilation_op(const FockBasis& basis, int mode) { return creation_op(basis, mode).adjoint(); }

Mat creation_smeared(const FockBasis& basis, const std::vector<Complex>& values) {
    if (values.size() != basis.grid.modes.size())
        throw SrgError("creation_smeared: one value per mode required");
    Mat a = Mat::Zero(basis.dim(), basis.dim());
    std::vector<int> target;
    for (Index i = 0; i < basis.dim(); ++i) {
        for (int m = 0; m < basis.grid.mode_count(); ++m) {
            if (values[m] == Complex(0.0, 0.0)) continue;
            target = basis.states[i];
            target[m] += 1;
            auto it = basis.index.find(target);
            if (it == basis.index.end()) continue;
            a(it->second, i) += std::sqrt(basis.grid.modes[m].weight) *
                                std::sqrt(static_cast<double>(target[m])) * values[m];
        }
    }
    return a;
}

Mat smeared_field(const FockBasis& basis, const std::vector<Complex>& values) {
    Mat c = creation_smeared(basis, values);
    return c + Mat(c.adjoint());
}

Mat hf_op(const FockBasis& basis) {
    Mat h = Mat::Zero(basis.dim(), basis.dim());
    for (Index i = 0; i < basis.dim(); ++i) h(i, i) = basis.hf[i];
    return h;
}

Mat reduced_projection(const FockBasis& basis) {
    Mat p = Mat::Zero(basis.dim(), basis.dim());
    for (Index i = 0; i < basis.dim(); ++i)
        if (basis.hf[i] <= 1.0 + 1e-12) p(i, i) = 1.0;
    return p;
}

DilationOp dilation_op(const FockBasis& basis) {
    const int m = basis.grid.mode_count();
    const int a_nodes = basis.grid.angular;
    DilationOp d;
    d.gamma = Mat::Zero(basis.dim(), basis.dim());
    std::vector<int> target(m);
    for (Index i = 0; i < basis.dim(); ++i) {
        const auto& occ = basis.states[i];
        bool shell0 = false, deepest = false;
        for (int mm = 0; mm < m; ++mm) {
            if (occ[mm] == 0) continue;
            if (basis.grid.modes[mm].shell == 0) shell0 = true;
            if (basis.grid.modes[mm].shell == basis.grid.shells - 1) deepest = true;
        }
        if (deepest) d.leak_states.push_back(i);
        if (shell0) continue;  // outside the domain of Gamma_rho
        d.domain.push_back(i);
        std::fill(target.begin(), target.end(), 0);
        for (int mm = 0; mm < m; ++mm)
            if (occ[mm] > 0) target[mm - a_nodes] = occ[mm];  // shell j -> j-1
        d.gamma(basis.index.at(target), i) = 1.0;
    }
    return d;
}

}  // namespace srg
