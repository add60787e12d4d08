#pragma once

#include "srg/kernels.hpp"
#include "srg/model.hpp"
#include "srg/types.hpp"

#include <vector>

namespace srg {

// Contraction pattern for one order-L term of the Neumann expansion: each
// slot carries exactly one role.
enum class SlotRole { ExternalCreate, ContractedCreate, ExternalAnnihilate, ContractedAnnihilate };

struct ContractionTuple {
    std::vector<SlotRole> roles;  // slot l = 1..L

    int order() const { return static_cast<int>(roles.size()); }
    int external_creations() const;
    int external_annihilations() const;
    int contracted_count() const;
};

// All tuples in I_L with |m| = M external creations and |n| = N external
// annihilations, in a fixed deterministic order.
std::vector<ContractionTuple> enumerate_tuples(int l, int m, int n);

// F(r) = boldchibar^2(s,r) / (H_at(s) - z + r) as an atom matrix.
Mat resolvent_profile(const ModelSpec& spec, Complex s, Complex z, double r);

// Evaluation context: contracted ladder operators live on a small auxiliary
// Fock space (contracted pairs never stack higher than one boson for L <= 3),
// external bosons enter only through the energy shifts r_l.
struct WickContext {
    ModelSpec spec;
    Complex s, z;
    FockBasis sub;     // same grid, low boson cap
    AtomicData atom;
    Mat a_create;      // a^*(G_s) on atom (x) sub
    Mat a_annihilate;  // a(G_sbar)
};

WickContext make_wick_context(const ModelSpec& spec, Complex s, Complex z, const ModeGrid& grid,
                              int l_max);

// V_{m,p,n,q}(r, modes): vacuum-and-atom expectation of the alternating
// product of coupling factors, contracted ladder operators and resolvent
// profiles, including the outer chi_1 factors.  `modes` assigns a grid mode
// to each external slot, in slot order.
Complex kernel_V(const WickContext& ctx, const ContractionTuple& tuple, double r,
                 const std::vector<int>& modes);

struct WickBounds {
    double c0 = 0.0;          // sup (H_f+1) F(H_f+r)
    double c1 = 0.0;          // sup (H_f+1) F'(H_f+r)
    double g_omega = 0.0;     // discrete ||G||_omega
    double g_mu = 0.0;        // discrete ||G||_mu
    double c_at = 0.0;        // sup ||P_at||
    double chi1_prime_sup = 0.0;
};

struct WickKernels {
    int l_max = 2;
    KernelSequence seq;       // w00 plus symmetrised what_{M,N}, M+N <= 2
    Complex e_at;
    WickBounds bounds;
    // every evaluated V against its product bound
    size_t v_count = 0;
    double max_v_ratio = 0.0;  // max |V| / rhs over all evaluations
};

WickKernels assemble_w(const ModelSpec& spec, Complex s, Complex z, int l_max,
                       const FockBasis& comparison_basis);

// || H(what) - H^(0)[s,z] || at g and g/2.  The comparison runs on states
// with fewer than n_max bosons: on the top sector a boson-number-truncated
// resolvent is missing its last creation route, which the continuum kernels
// retain, so only the interior sector tests the expansion order cleanly.
struct WickCompare {
    double residual = 0.0;
    double residual_half = 0.0;
    double ratio = 0.0;
    double expected_ratio = 0.0;  // 2^(L_max+1)
    bool ratio_ok = false;        // within [expected/1.3, expected*1.3]
};

WickCompare compare_with_direct(const ModelSpec& spec, Complex s, Complex z, int l_max,
                                const FockBasis& basis);

struct WickBoundReport {
    WickBounds bounds;
    size_t v_checked = 0;
    double worst_v1_margin = 0.0;  // min (rhs - |V|) over checked kernels
    bool v1_ok = false;
    double worst_v2_margin = 0.0;  // same for the derivative bound
    bool v2_ok = false;
    double a_create_norm = 0.0;    // ||a*(G)(H_f+1)^{-1/2}||
    double a_create_bound = 0.0;   // ||G||_omega
    double a_annihilate_norm = 0.0;
    double a_annihilate_bound = 0.0;  // (int ||G||^2/|k|)^{1/2}
    bool a_bounds_ok = false;
};

WickBoundReport bound_check(const ModelSpec& spec,
                            const std::vector<std::pair<Complex, Complex>>& samples, int l_max,
                            const FockBasis& basis);

}  // namespace srg
