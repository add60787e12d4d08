#pragma once

#include "srg/fock.hpp"
#include "srg/types.hpp"

#include <array>
#include <vector>

namespace srg {

// Scalar smooth-step cutoff shape: chi(t) = cos(pi/2 * theta(u)),
// chibar(t) = sin(pi/2 * theta(u)) with u = (t - 3rho/4)/(rho/4) and theta a
// C^1 cubic smoothstep.  chi == 1 below 3rho/4, chi == 0 above rho, and
// chi^2 + chibar^2 == 1 identically.
double chi_shape(double t, double rho);
double chibar_shape(double t, double rho);
double chibar_shape_deriv(double t, double rho);

// Commuting diagonal cutoff pair evaluated on a basis-aligned spectrum.
struct CutoffPair {
    RVec chi;
    RVec chibar;
    std::vector<Index> support;  // coordinates with chibar != 0
    double rho = 0.0;

    static CutoffPair from_diagonals(const RVec& chi, const RVec& chibar, double rho);
};

CutoffPair make_cutoffs(const FockBasis& basis, double rho);
CutoffPair make_cutoffs(const RVec& spectrum, double rho);

struct ConditionReport {
    double commutator_chi = 0.0;      // ||[T,chi]||
    double commutator_chibar = 0.0;   // ||[T,chibar]||
    double sigma_min_support = 0.0;   // smallest singular value of T on the chibar support
    double neumann_left = 0.0;        // ||T^-1 chibar W chibar||
    double neumann_right = 0.0;       // ||chibar W T^-1 chibar||
    double cross_norm = 0.0;          // ||T^-1 chibar W chi||
    bool pass = false;
};

ConditionReport check_pair(const Mat& h, const Mat& t, const CutoffPair& cut);

struct FeshbachResult {
    Mat f;             // F_chi(H,T) on the ambient space
    Mat q;             // Q_chi
    Mat q_sharp;       // Q_chi^#
    Mat hbar_inverse;  // (T + chibar W chibar)^-1 on Ran chibar, zero-padded
    ConditionReport condition;
};

FeshbachResult feshbach_map(const Mat& h, const Mat& t, const CutoffPair& cut);

// The six residual norms of the algebraic identities relating H, F, Q, Q#.
std::array<double, 6> identity_residuals(const Mat& h, const Mat& t, const CutoffPair& cut,
                                         const FeshbachResult& r);

struct IsospectralityReport {
    double sigma_min_h = 0.0;
    double sigma_min_f = 0.0;  // F restricted to the chi-support coordinates
    bool h_singular = false;
    bool f_singular = false;
    bool consistent = false;
    double kernel_roundtrip_h = 0.0;  // ||Q chi v - v|| on ker H
    double kernel_roundtrip_f = 0.0;  // ||chi Q u - u|| on ker F
};

IsospectralityReport isospectrality_check(const Mat& h, const Mat& t, const CutoffPair& cut,
                                          const FeshbachResult& r, double tol_scale = 1e-8);

}  // namespace srg
