#include "srg/wick.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace srg {

int ContractionTuple::external_creations() const {
    return static_cast<int>(std::count(roles.begin(), roles.end(), SlotRole::ExternalCreate));
}

int ContractionTuple::external_annihilations() const {
    return static_cast<int>(std::count(roles.begin(), roles.end(), SlotRole::ExternalAnnihilate));
}

int ContractionTuple::contracted_count() const {
    return order() - external_creations() - external_annihilations();
}

std::vector<ContractionTuple> enumerate_tuples(int l, int m, int n) {
    if (l < std::max(1, m + n)) throw SrgError("enumerate_tuples: L must be >= max(1, M+N)");
    std::vector<ContractionTuple> out;
    const int total = static_cast<int>(std::pow(4, l));
    for (int code = 0; code < total; ++code) {
        ContractionTuple t;
        t.roles.resize(l);
        int c = code;
        for (int slot = l - 1; slot >= 0; --slot) {
            t.roles[slot] = static_cast<SlotRole>(c % 4);
            c /= 4;
        }
        if (t.external_creations() == m && t.external_annihilations() == n) out.push_back(t);
    }
    return out;
}

Mat resolvent_profile(const ModelSpec& spec, Complex s, Complex z, double r) {
    const AtomicData at = atomic_projection(spec, s);
    const Index d = spec.atom_dim();
    const Mat denom = spec.h_at(s) + (r - z) * Mat::Identity(d, d);
    if (sigma_min(denom) < 1e-12)
        throw SrgError("resolvent_profile: atomic resolvent singular at the requested energy");
    const double cb = chibar_shape(r, 1.0);
    const Mat num = (Mat::Identity(d, d) - at.p_at) + cb * cb * at.p_at;
    return denom.partialPivLu().solve(num);
}

WickContext make_wick_context(const ModelSpec& spec, Complex s, Complex z, const ModeGrid& grid,
                              int l_max) {
    if (l_max > 3) throw SrgError("make_wick_context: L_max above 3 rejected (cost guard)");
    WickContext ctx{spec, s, z, FockBasis{}, AtomicData{}, Mat{}, Mat{}};
    // contracted excursions reach at most floor(L/2) bosons above the vacuum
    const int cap = std::max(1, l_max / 2);
    ctx.sub = build_fock(grid, cap);
    ctx.atom = atomic_projection(spec, s);
    std::vector<Mat> g_s(grid.modes.size()), g_sbar(grid.modes.size());
    for (size_t m = 0; m < grid.modes.size(); ++m) {
        g_s[m] = spec.coupling(s, grid.modes[m].k);
        g_sbar[m] = spec.coupling(std::conj(s), grid.modes[m].k);
    }
    ctx.a_create = tensor_creation(ctx.sub, g_s);
    ctx.a_annihilate = tensor_creation(ctx.sub, g_sbar).adjoint();
    return ctx;
}

namespace {

// energy shift r_l = sum_{i<=l, external creation} |k_i| + sum_{i>l, external annihilation} |k_i|
double shift_r(const ContractionTuple& t, const std::vector<double>& slot_k, int l) {
    double r = 0.0;
    for (int i = 0; i < t.order(); ++i) {
        if (t.roles[i] == SlotRole::ExternalCreate && i + 1 <= l) r += slot_k[i];
        if (t.roles[i] == SlotRole::ExternalAnnihilate && i + 1 >= l + 1) r += slot_k[i];
    }
    return r;
}

void apply_atom(Vec& x, const Mat& a, Index df) {
    const Index da = a.rows();
    Vec y = Vec::Zero(x.size());
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j)
            if (a(i, j) != Complex(0, 0)) y.segment(i * df, df) += a(i, j) * x.segment(j * df, df);
    x = std::move(y);
}

// F(hf + t) applied blockwise over the auxiliary Fock index
void apply_resolvent(Vec& x, const WickContext& ctx, double t) {
    const Index da = ctx.spec.atom_dim();
    const Index df = ctx.sub.dim();
    const Mat id = Mat::Identity(da, da);
    const Mat pbar = id - ctx.atom.p_at;
    const Mat hat = ctx.spec.h_at(ctx.s);
    for (Index j = 0; j < df; ++j) {
        const double arg = ctx.sub.hf[j] + t;
        Vec blk(da);
        for (Index i = 0; i < da; ++i) blk(i) = x(i * df + j);
        const double cb = chibar_shape(arg, 1.0);
        const Vec num = pbar * blk + cb * cb * (ctx.atom.p_at * blk);
        const Mat denom = hat + (arg - ctx.z) * id;
        const Vec sol = denom.partialPivLu().solve(num);
        for (Index i = 0; i < da; ++i) x(i * df + j) = sol(i);
    }
}

}  // namespace

Complex kernel_V(const WickContext& ctx, const ContractionTuple& tuple, double r,
                 const std::vector<int>& modes) {
    const int l_ord = tuple.order();
    const int n_ext = tuple.external_creations() + tuple.external_annihilations();
    if (static_cast<int>(modes.size()) != n_ext)
        throw SrgError("kernel_V: one grid mode per external slot required");

    std::vector<double> slot_k(l_ord, 0.0);
    std::vector<int> slot_mode(l_ord, -1);
    {
        int e = 0;
        for (int i = 0; i < l_ord; ++i)
            if (tuple.roles[i] == SlotRole::ExternalCreate ||
                tuple.roles[i] == SlotRole::ExternalAnnihilate) {
                slot_mode[i] = modes[e];
                slot_k[i] = ctx.sub.grid.modes[modes[e]].k;
                ++e;
            }
    }

    const Index da = ctx.spec.atom_dim();
    const Index df = ctx.sub.dim();
    Vec x = Vec::Zero(da * df);
    for (Index i = 0; i < da; ++i) x(i * df) = ctx.atom.right_vector(i);  // r (x) vacuum

    for (int l = l_ord; l >= 1; --l) {
        switch (tuple.roles[l - 1]) {
            case SlotRole::ExternalCreate:
                apply_atom(x, ctx.spec.coupling(ctx.s, slot_k[l - 1]), df);
                break;
            case SlotRole::ExternalAnnihilate:
                apply_atom(x, ctx.spec.coupling(std::conj(ctx.s), slot_k[l - 1]).adjoint(), df);
                break;
            case SlotRole::ContractedCreate:
                x = ctx.a_create * x;
                break;
            case SlotRole::ContractedAnnihilate:
                x = ctx.a_annihilate * x;
                break;
        }
        if (l - 1 >= 1) apply_resolvent(x, ctx, r + shift_r(tuple, slot_k, l - 1));
        if (x.norm() == 0.0) return 0.0;
    }

    Complex acc = 0.0;
    for (Index i = 0; i < da; ++i) acc += std::conj(ctx.atom.left_vector(i)) * x(i * df);
    const double r0 = shift_r(tuple, slot_k, 0);
    const double rl = shift_r(tuple, slot_k, l_ord);
    return chi_shape(r + r0, 1.0) * acc * chi_shape(r + rl, 1.0);
}

namespace {

double v1_rhs(const WickContext& ctx, const WickBounds& b, const ContractionTuple& t,
              const std::vector<double>& slot_k) {
    double prod = 1.0;
    for (int i = 0; i < t.order(); ++i) {
        switch (t.roles[i]) {
            case SlotRole::ExternalCreate:
            case SlotRole::ExternalAnnihilate:
                prod *= op_norm(ctx.spec.coupling(ctx.s, slot_k[i]));
                break;
            default:
                prod *= b.g_omega;
        }
    }
    return prod * std::pow(b.c0, t.order() - 1) * b.c_at;
}

WickBounds compute_bounds(const ModelSpec& spec, const std::vector<std::pair<Complex, Complex>>& samples,
                          const ModeGrid& grid) {
    WickBounds b;
    b.chi1_prime_sup = 0.0;
    for (double t = 0.70; t <= 1.05; t += 1e-4)
        b.chi1_prime_sup = std::max(b.chi1_prime_sup, std::abs(chibar_shape_deriv(t, 1.0)));

    std::vector<double> rgrid;
    for (double r = 0.0; r <= 4.0; r += 0.05) rgrid.push_back(r);
    for (double r : {6.0, 10.0, 25.0}) rgrid.push_back(r);

    const Index d = spec.atom_dim();
    const Mat id = Mat::Identity(d, d);
    for (const auto& [s, z] : samples) {
        const AtomicData at = atomic_projection(spec, s);
        b.c_at = std::max(b.c_at, op_norm(at.p_at));
        const Mat pbar = id - at.p_at;
        const Mat hat = spec.h_at(s);
        for (double r : rgrid) {
            // (H_f+1) F(H_f+r) has norm sup_q (q+1) ||F(q+r)||
            for (double q : rgrid) {
                const double arg = q + r;
                const Mat denom = hat + (arg - z) * id;
                if (sigma_min(denom) < 1e-12) continue;
                const double cb = chibar_shape(arg, 1.0);
                const Mat f = denom.partialPivLu().solve(pbar + cb * cb * at.p_at);
                b.c0 = std::max(b.c0, (q + 1.0) * op_norm(f));
                const Mat f2 = denom.partialPivLu().solve(Mat(denom.partialPivLu().solve(pbar + cb * cb * at.p_at)));
                const Mat fp = -f2 + 2.0 * cb * chibar_shape_deriv(arg, 1.0) *
                                         denom.partialPivLu().solve(at.p_at);
                b.c1 = std::max(b.c1, (q + 1.0) * op_norm(fp));
            }
        }
        std::vector<double> gv(grid.modes.size());
        for (size_t m = 0; m < grid.modes.size(); ++m) gv[m] = op_norm(spec.coupling(s, grid.modes[m].k));
        b.g_omega = std::max(b.g_omega, std::sqrt(grid_norm_omega_sq(grid, gv)));
        b.g_mu = std::max(b.g_mu, std::sqrt(grid_norm_mu_sq(grid, gv, spec.mu)));
    }
    return b;
}

}  // namespace

WickKernels assemble_w(const ModelSpec& spec, Complex s, Complex z, int l_max,
                       const FockBasis& comparison_basis) {
    if (l_max > 3) throw SrgError("assemble_w: L_max above 3 rejected (cost guard)");
    WickContext ctx = make_wick_context(spec, s, z, comparison_basis.grid, l_max);
    WickKernels out;
    out.l_max = l_max;
    out.e_at = ctx.atom.e_at;
    out.bounds = compute_bounds(spec, {{s, z}}, comparison_basis.grid);

    const double g = spec.g;
    const int mcount = comparison_basis.grid.mode_count();

    // r samples: every distinct H_f eigenvalue of the comparison space, so the
    // assembled operator is applied exactly at sampled points
    std::set<double> rset{0.0, 1.0};
    for (Index i = 0; i < comparison_basis.dim(); ++i)
        if (comparison_basis.hf[i] <= 1.0 + 1e-12) rset.insert(comparison_basis.hf[i]);
    KernelSequence& seq = out.seq;
    seq.mu = spec.mu;
    seq.r_grid.assign(rset.begin(), rset.end());
    const size_t nr = seq.r_grid.size();
    const double h_fd = 1e-6;

    auto track = [&](const ContractionTuple& t, const std::vector<double>& slot_k, Complex v) {
        out.v_count += 1;
        const double rhs = v1_rhs(ctx, out.bounds, t, slot_k);
        if (rhs > 0.0) out.max_v_ratio = std::max(out.max_v_ratio, std::abs(v) / rhs);
    };

    // w00: E_at - z + r plus the p/q-only series
    seq.w00.assign(nr, Complex(0.0));
    seq.w00_deriv.assign(nr, Complex(0.0));
    for (size_t ri = 0; ri < nr; ++ri) {
        const double r = seq.r_grid[ri];
        Complex acc = ctx.atom.e_at - z + r;
        Complex dacc = 1.0;
        double sign = 1.0;  // (-1)^{L-1}
        for (int L = 1; L <= l_max; ++L) {
            for (const auto& t : enumerate_tuples(L, 0, 0)) {
                const Complex v = kernel_V(ctx, t, r, {});
                const Complex vp = kernel_V(ctx, t, r + h_fd, {});
                const Complex vm = kernel_V(ctx, t, std::max(0.0, r - h_fd), {});
                acc += sign * std::pow(g, L) * v;
                dacc += sign * std::pow(g, L) * (vp - vm) / (h_fd + (r < h_fd ? r : h_fd));
                track(t, std::vector<double>(L, 0.0), v);
            }
            sign = -sign;
        }
        seq.w00[ri] = acc;
        seq.w00_deriv[ri] = dacc;
    }

    // what_{M,N} for 1 <= M+N <= 2, symmetrised over each external block
    for (int M = 0; M <= 2; ++M)
        for (int N = 0; N + M <= 2; ++N) {
            if (M + N == 0) continue;
            const int slots = M + N;
            const size_t ntuples = static_cast<size_t>(std::pow(mcount, slots));
            auto& vals = seq.wmn[{M, N}];
            auto& dvals = seq.wmn_deriv[{M, N}];
            vals.assign(nr, std::vector<Complex>(ntuples, Complex(0.0)));
            dvals.assign(nr, std::vector<Complex>(ntuples, Complex(0.0)));

            for (size_t tup = 0; tup < ntuples; ++tup) {
                std::vector<int> ext(slots);
                size_t tt = tup;
                for (int sl = slots - 1; sl >= 0; --sl) {
                    ext[sl] = static_cast<int>(tt % mcount);
                    tt /= mcount;
                }
                // average over block permutations (creation block then annihilation block)
                std::vector<std::vector<int>> assignments;
                if (M == 2) assignments = {{ext[0], ext[1]}, {ext[1], ext[0]}};
                else if (N == 2) assignments = {{ext[0], ext[1]}, {ext[1], ext[0]}};
                else assignments = {ext};

                for (size_t ri = 0; ri < nr; ++ri) {
                    const double r = seq.r_grid[ri];
                    Complex acc = 0.0, dacc = 0.0;
                    double sign = 1.0;
                    for (int L = 1; L <= l_max; ++L) {
                        if (L >= std::max(1, M + N)) {
                            for (const auto& t : enumerate_tuples(L, M, N)) {
                                for (const auto& a : assignments) {
                                    const Complex v = kernel_V(ctx, t, r, a);
                                    const Complex vp = kernel_V(ctx, t, r + h_fd, a);
                                    const Complex vm = kernel_V(ctx, t, std::max(0.0, r - h_fd), a);
                                    acc += sign * std::pow(g, L) * v / static_cast<double>(assignments.size());
                                    dacc += sign * std::pow(g, L) * (vp - vm) /
                                            (h_fd + (r < h_fd ? r : h_fd)) /
                                            static_cast<double>(assignments.size());
                                    if (ri == 0) {
                                        std::vector<double> slot_k(L, 0.0);
                                        int e = 0;
                                        for (int i = 0; i < L; ++i)
                                            if (t.roles[i] == SlotRole::ExternalCreate ||
                                                t.roles[i] == SlotRole::ExternalAnnihilate)
                                                slot_k[i] = ctx.sub.grid.modes[a[e++]].k;
                                        track(t, slot_k, v);
                                    }
                                }
                            }
                        }
                        sign = -sign;
                    }
                    vals[ri][tup] = acc;
                    dvals[ri][tup] = dacc;
                }
            }
        }
    return out;
}

WickCompare compare_with_direct(const ModelSpec& spec, Complex s, Complex z, int l_max,
                                const FockBasis& basis) {
    auto residual_at = [&](double g) {
        ModelSpec trial = spec;
        trial.g = g;
        const WickKernels wk = assemble_w(trial, s, z, l_max, basis);
        const Mat hw = op_from_kernels(wk.seq, basis);
        const Mat h0 = initial_effective(trial, s, z, basis).h0;

        // interior sector: strictly fewer than n_max bosons (see header)
        const auto red = basis.reduced_indices();
        std::vector<Index> interior;
        for (size_t i = 0; i < red.size(); ++i) {
            int tot = 0;
            for (int o : basis.states[red[i]]) tot += o;
            if (tot < basis.n_max) interior.push_back(static_cast<Index>(i));
        }
        return op_norm(submatrix(hw - h0, interior, interior));
    };

    WickCompare cmp;
    cmp.residual = residual_at(spec.g);
    cmp.residual_half = residual_at(spec.g / 2.0);
    cmp.expected_ratio = std::pow(2.0, l_max + 1);
    cmp.ratio = cmp.residual_half > 0.0 ? cmp.residual / cmp.residual_half : 0.0;
    cmp.ratio_ok = cmp.ratio >= cmp.expected_ratio / 1.3 && cmp.ratio <= cmp.expected_ratio * 1.3;
    return cmp;
}

WickBoundReport bound_check(const ModelSpec& spec,
                            const std::vector<std::pair<Complex, Complex>>& samples, int l_max,
                            const FockBasis& basis) {
    if (samples.empty()) throw SrgError("bound_check: samples must be nonempty");
    WickBoundReport rep;
    rep.bounds = compute_bounds(spec, samples, basis.grid);

    const auto& [s0, z0] = samples.front();
    WickContext ctx = make_wick_context(spec, s0, z0, basis.grid, l_max);

    const int mcount = basis.grid.mode_count();
    std::vector<int> probe_modes = {0, mcount / 2, mcount - 1};
    std::vector<double> probe_r = {0.0, 0.1, 0.5};
    const double h_fd = 1e-6;

    rep.worst_v1_margin = std::numeric_limits<double>::infinity();
    rep.worst_v2_margin = std::numeric_limits<double>::infinity();
    for (int L = 1; L <= l_max; ++L) {
        for (int M = 0; M <= std::min(2, L); ++M)
            for (int N = 0; M + N <= std::min(2, L); ++N) {
                for (const auto& t : enumerate_tuples(L, M, N)) {
                    for (int pm : probe_modes) {
                        std::vector<int> modes(M + N, pm);
                        std::vector<double> slot_k(L, 0.0);
                        int e = 0;
                        for (int i = 0; i < L; ++i)
                            if (t.roles[i] == SlotRole::ExternalCreate ||
                                t.roles[i] == SlotRole::ExternalAnnihilate)
                                slot_k[i] = basis.grid.modes[modes[e++]].k;
                        const double rhs1 = v1_rhs(ctx, rep.bounds, t, slot_k);
                        const double s_l = rep.bounds.c_at * std::pow(rep.bounds.c0, L - 2) *
                                           (2.0 * rep.bounds.chi1_prime_sup * rep.bounds.c0 +
                                            (L - 1) * rep.bounds.c1);
                        double ext_prod = 1.0;
                        for (int i = 0; i < L; ++i) {
                            if (t.roles[i] == SlotRole::ExternalCreate ||
                                t.roles[i] == SlotRole::ExternalAnnihilate)
                                ext_prod *= op_norm(ctx.spec.coupling(s0, slot_k[i]));
                            else
                                ext_prod *= rep.bounds.g_omega;
                        }
                        const double rhs2 = ext_prod * s_l;
                        for (double r : probe_r) {
                            const Complex v = kernel_V(ctx, t, r, modes);
                            rep.v_checked += 1;
                            rep.worst_v1_margin = std::min(rep.worst_v1_margin, rhs1 - std::abs(v));
                            const Complex vp = kernel_V(ctx, t, r + h_fd, modes);
                            const Complex vm = kernel_V(ctx, t, std::max(0.0, r - h_fd), modes);
                            const double dv = std::abs(vp - vm) / (h_fd + std::min(r, h_fd));
                            rep.worst_v2_margin = std::min(rep.worst_v2_margin, rhs2 - dv);
                        }
                    }
                }
            }
    }
    rep.v1_ok = rep.worst_v1_margin >= -1e-12;
    rep.v2_ok = rep.worst_v2_margin >= -1e-10;

    // discrete analogue of the a^#(T)(H_f+1)^{-1/2} bounds
    {
        std::vector<Mat> g_s(basis.grid.modes.size());
        double mu_int = 0.0;
        for (size_t m = 0; m < basis.grid.modes.size(); ++m) {
            g_s[m] = spec.coupling(s0, basis.grid.modes[m].k);
            const double gn = op_norm(g_s[m]);
            mu_int += basis.grid.modes[m].weight * gn * gn / basis.grid.modes[m].k;
        }
        const Mat ac = tensor_creation(basis, g_s);
        const Index da = spec.atom_dim(), df = basis.dim();
        RVec scale(da * df);
        for (Index i = 0; i < da; ++i)
            for (Index j = 0; j < df; ++j)
                scale(i * df + j) = 1.0 / std::sqrt(basis.hf[j] + 1.0);
        const Mat acs = ac * scale.cast<Complex>().asDiagonal();
        rep.a_create_norm = op_norm(acs);
        rep.a_create_bound = rep.bounds.g_omega;
        const Mat aas = Mat(ac.adjoint()) * scale.cast<Complex>().asDiagonal();
        rep.a_annihilate_norm = op_norm(aas);
        rep.a_annihilate_bound = std::sqrt(mu_int);
        rep.a_bounds_ok = rep.a_create_norm <= rep.a_create_bound + 1e-12 &&
                          rep.a_annihilate_norm <= rep.a_annihilate_bound + 1e-12;
    }
    return rep;
}

}  // namespace srg
