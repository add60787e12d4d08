#pragma once

#include "srg/grid.hpp"
#include "srg/types.hpp"

#include <map>
#include <vector>

namespace srg {

// Occupation-number basis over the grid modes, truncated at n_max bosons in
// total.  States are ordered by total boson number, lexicographically within
// a sector; the vacuum is state 0.
struct FockBasis {
    ModeGrid grid;
    int n_max = 0;
    std::vector<std::vector<int>> states;      // occupation per mode
    std::vector<double> hf;                    // sum_i n_i |k_i| per state
    std::map<std::vector<int>, Index> index;   // state -> position

    Index dim() const { return static_cast<Index>(states.size()); }

    // Indices of the reduced space H_red = { hf <= 1 }.
    std::vector<Index> reduced_indices() const;
};

FockBasis build_fock(const ModeGrid& grid, int n_max, Index dim_cap = 20000);

Mat creation_op(const FockBasis& basis, int mode);
Mat annihilation_op(const FockBasis& basis, int mode);

// a^*(G) = sum_m sqrt(w_m) G(k_m) b*_m for scalar per-mode values G(k_m).
Mat creation_smeared(const FockBasis& basis, const std::vector<Complex>& values);

// a^*(G) + a(G^dagger); self-adjoint for real scalar G.
Mat smeared_field(const FockBasis& basis, const std::vector<Complex>& values);

Mat hf_op(const FockBasis& basis);
Mat reduced_projection(const FockBasis& basis);

// Dilation Gamma_rho lifted to the Fock space: every boson moves one shell up
// in momentum (shell j -> j-1); states containing a shell-0 boson are outside
// the domain and map to zero.  Gamma^* moves bosons down and annihilates any
// state occupying the deepest shell J-1 -- that loss is the truncation
// leakage, so those states are reported instead of silently padded.
struct DilationOp {
    Mat gamma;                       // on the full Fock basis
    std::vector<Index> domain;       // states with all bosons in shells >= 1
    std::vector<Index> leak_states;  // states with a shell-(J-1) boson
};

DilationOp dilation_op(const FockBasis& basis);

}  // namespace srg
