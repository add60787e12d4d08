#include "srg/model.hpp"

#include "srg/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace srg {

Mat ModelSpec::h_at(Complex s) const {
    Mat h = Mat::Zero(atom_dim(), atom_dim());
    Complex sp = 1.0;
    for (const auto& a : h_at_coeffs) {
        h += sp * a;
        sp *= s;
    }
    return h;
}

Mat ModelSpec::coupling(Complex s, double k) const {
    if (k > uv_cutoff) return Mat::Zero(atom_dim(), atom_dim());
    return s * std::pow(k, g0_exponent) * d_matrix;
}

void ModelSpec::validate() const {
    if (h_at_coeffs.empty()) throw SrgError("ModelSpec: no atomic coefficients");
    for (const auto& a : h_at_coeffs) {
        if (a.rows() != atom_dim() || a.cols() != atom_dim())
            throw SrgError("ModelSpec: coefficient dimensions differ");
        if ((a - Mat(a.adjoint())).norm() > 1e-12 * std::max(1.0, a.norm()))
            throw SrgError("ModelSpec: atomic coefficients must be Hermitian (H_at(sbar) = H_at(s)^*)");
    }
    if (d_matrix.rows() != atom_dim() || d_matrix.cols() != atom_dim())
        throw SrgError("ModelSpec: coupling matrix dimension mismatch");
    if (g < 0.0) throw SrgError("ModelSpec: g must be >= 0");
    if (mu <= 0.0) throw SrgError("ModelSpec: mu must be > 0");
}

ModelSpec spin_boson_spec(double g, double s0) {
    ModelSpec m;
    m.name = "spin_boson";
    Mat a0(2, 2), sx(2, 2);
    a0 << 0, 0, 0, 1;
    sx << 0, 1, 1, 0;
    m.h_at_coeffs = {a0, sx};
    m.d_matrix = sx;
    m.g0_exponent = 0.5;
    m.g = g;
    m.s0 = s0;
    m.validate();
    return m;
}

ModelSpec dipole_toy_spec(const std::vector<Mat>& h_at_coeffs, const Mat& d, double g, double s0) {
    ModelSpec m;
    m.name = "dipole_toy";
    m.h_at_coeffs = h_at_coeffs;
    m.d_matrix = d;
    m.g = g;
    m.s0 = s0;
    m.validate();
    return m;
}

AtomicData atomic_projection(const ModelSpec& spec, Complex s) {
    const Index d = spec.atom_dim();

    // reference point: ground eigenvalue and vector of the self-adjoint H_at(s0)
    Eigen::SelfAdjointEigenSolver<Mat> es0(spec.h_at(spec.s0));
    const double e0 = es0.eigenvalues()(0);
    const Vec v0 = es0.eigenvectors().col(0);
    double gap = std::numeric_limits<double>::infinity();
    for (Index i = 1; i < d; ++i) gap = std::min(gap, es0.eigenvalues()(i) - e0);
    if (!(gap > 0.0)) throw SrgError("atomic_projection: ground eigenvalue of H_at(s0) is degenerate");

    Eigen::ComplexEigenSolver<Mat> es(spec.h_at(s));
    if (es.info() != Eigen::Success) throw SrgError("atomic_projection: eigensolver failed");

    Index tracked = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d; ++i) {
        const double dist = std::abs(es.eigenvalues()(i) - e0);
        if (dist < best) {
            best = dist;
            tracked = i;
        }
    }
    for (Index i = 0; i < d; ++i) {
        if (i == tracked) continue;
        if (std::abs(es.eigenvalues()(i) - es.eigenvalues()(tracked)) < 1e-8 * gap)
            throw SrgError("atomic_projection: eigenvalue collision near the tracked branch");
    }

    AtomicData a;
    a.gap = gap;
    a.eigs = Vec(d);
    a.v = Mat(d, d);
    // tracked branch first
    std::vector<Index> order(static_cast<size_t>(d));
    order[0] = tracked;
    for (Index i = 0, pos = 1; i < d; ++i)
        if (i != tracked) order[static_cast<size_t>(pos++)] = i;
    for (Index i = 0; i < d; ++i) {
        a.eigs(i) = es.eigenvalues()(order[static_cast<size_t>(i)]);
        a.v.col(i) = es.eigenvectors().col(order[static_cast<size_t>(i)]);
    }
    a.v_inv = a.v.inverse();
    a.e_at = a.eigs(0);

    // spectral projection (gauge-free), then an analytic gauge through v0
    a.p_at = a.v.col(0) * a.v_inv.row(0);
    a.right_vector = a.p_at * v0;
    const Complex w = v0.dot(a.right_vector);  // v0^H P v0
    if (std::abs(w) < 1e-12)
        throw SrgError("atomic_projection: reference vector orthogonal to the tracked branch");
    a.left_vector = Vec(a.p_at.adjoint() * v0) / std::conj(w);
    return a;
}

Mat tensor_creation(const FockBasis& basis, const std::vector<Mat>& atom_values) {
    if (atom_values.size() != basis.grid.modes.size())
        throw SrgError("tensor_creation: one atom matrix per mode required");
    const Index da = atom_values.empty() ? 0 : atom_values[0].rows();
    const Index df = basis.dim();
    Mat out = Mat::Zero(da * df, da * df);
    std::vector<int> target;
    for (Index j = 0; j < df; ++j) {
        for (int m = 0; m < basis.grid.mode_count(); ++m) {
            if (atom_values[m].size() == 0 || atom_values[m].norm() == 0.0) continue;
            target = basis.states[j];
            target[m] += 1;
            auto it = basis.index.find(target);
            if (it == basis.index.end()) continue;
            const double amp =
                std::sqrt(basis.grid.modes[m].weight) * std::sqrt(static_cast<double>(target[m]));
            const Index jt = it->second;
            for (Index r = 0; r < da; ++r)
                for (Index c = 0; c < da; ++c)
                    out(r * df + jt, c * df + j) += amp * atom_values[m](r, c);
        }
    }
    return out;
}

namespace {

// W(s) = a(G_sbar) + a*(G_s) with a(T) the adjoint of a*(T).
Mat interaction(const ModelSpec& spec, Complex s, const FockBasis& basis) {
    std::vector<Mat> g_s(basis.grid.modes.size()), g_sbar(basis.grid.modes.size());
    for (size_t m = 0; m < basis.grid.modes.size(); ++m) {
        g_s[m] = spec.coupling(s, basis.grid.modes[m].k);
        g_sbar[m] = spec.coupling(std::conj(s), basis.grid.modes[m].k);
    }
    const Mat cre = tensor_creation(basis, g_s);
    const Mat cre_bar = tensor_creation(basis, g_sbar);
    return cre + Mat(cre_bar.adjoint());
}

}  // namespace

Mat assemble_H(const ModelSpec& spec, Complex s, const FockBasis& basis) {
    spec.validate();
    const Index da = spec.atom_dim();
    const Index df = basis.dim();
    Mat h = Mat::Zero(da * df, da * df);
    const Mat hat = spec.h_at(s);
    for (Index r = 0; r < da; ++r)
        for (Index c = 0; c < da; ++c)
            for (Index j = 0; j < df; ++j) h(r * df + j, c * df + j) += hat(r, c);
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < df; ++j) h(i * df + j, i * df + j) += basis.hf[j];
    if (spec.g != 0.0) h += spec.g * interaction(spec, s, basis);
    return h;
}

InitialReduction initial_effective(const ModelSpec& spec, Complex s, Complex z,
                                   const FockBasis& basis) {
    InitialReduction out;
    out.atom = atomic_projection(spec, s);
    const Index da = spec.atom_dim();
    const Index df = basis.dim();
    const Index n = da * df;

    // eigenframe transform: boldchi becomes diagonal with the tracked branch first
    Mat w = interaction(spec, s, basis);
    Mat w_frame = Mat::Zero(n, n);
    {
        // (V^-1 (x) 1) W (V (x) 1), exploiting the block structure over atom indices
        for (Index ra = 0; ra < da; ++ra)
            for (Index ca = 0; ca < da; ++ca) {
                Mat block = Mat::Zero(df, df);
                for (Index ia = 0; ia < da; ++ia)
                    for (Index ja = 0; ja < da; ++ja) {
                        const Complex fac = out.atom.v_inv(ra, ia) * out.atom.v(ja, ca);
                        if (fac == Complex(0.0, 0.0)) continue;
                        block += fac * w.block(ia * df, ja * df, df, df);
                    }
                w_frame.block(ra * df, ca * df, df, df) = block;
            }
    }

    Mat t = Mat::Zero(n, n);
    for (Index ia = 0; ia < da; ++ia)
        for (Index j = 0; j < df; ++j)
            t(ia * df + j, ia * df + j) = out.atom.eigs(ia) + basis.hf[j] - z;
    const Mat h = t + spec.g * w_frame;

    RVec chi(n), chibar(n);
    for (Index ia = 0; ia < da; ++ia)
        for (Index j = 0; j < df; ++j) {
            const double c = (ia == 0) ? chi_shape(basis.hf[j], 1.0) : 0.0;
            chi(ia * df + j) = c;
            chibar(ia * df + j) = (ia == 0) ? chibar_shape(basis.hf[j], 1.0) : 1.0;
        }
    const CutoffPair cut = CutoffPair::from_diagonals(chi, chibar, 1.0);

    FeshbachResult fr = feshbach_map(h, t, cut);
    out.pair = fr.condition;
    out.q_frame = std::move(fr.q);

    const auto red = basis.reduced_indices();
    out.h0 = Mat(red.size(), red.size());
    for (size_t ra = 0; ra < red.size(); ++ra)
        for (size_t ca = 0; ca < red.size(); ++ca) out.h0(ra, ca) = fr.f(red[ra], red[ca]);
    return out;
}

std::vector<std::pair<Complex, Complex>> u_samples(const ModelSpec& spec) {
    Eigen::SelfAdjointEigenSolver<Mat> es(spec.h_at(spec.s0));
    const double e0 = es.eigenvalues()(0);
    const double rs = spec.u_radius_s, rz = spec.u_radius_z;
    std::vector<Complex> ss = {spec.s0, spec.s0 + rs, spec.s0 - rs, Complex(spec.s0, rs),
                               Complex(spec.s0, -rs)};
    std::vector<Complex> zs = {e0, e0 + rz, e0 - rz, Complex(e0, rz), Complex(e0, -rz)};
    std::vector<std::pair<Complex, Complex>> out;
    for (const auto& s : ss)
        for (const auto& z : zs) out.emplace_back(s, z);
    return out;
}

HypothesisReport hypothesis_report(const ModelSpec& spec, const ModeGrid& grid,
                                   const FockBasis& basis,
                                   const std::vector<std::pair<Complex, Complex>>& samples) {
    if (samples.empty()) throw SrgError("hypothesis_report: samples must be nonempty");
    HypothesisReport rep;

    // Hypothesis 1: discrete coupling norms and an infrared divergence probe.
    // Shell contributions scale geometrically on the grid; a non-decaying
    // ratio between successive shells flags a divergent |k| integral.
    for (const auto& [s, z] : samples) {
        (void)z;
        std::vector<double> gvals(grid.modes.size());
        for (size_t m = 0; m < grid.modes.size(); ++m)
            gvals[m] = op_norm(spec.coupling(s, grid.modes[m].k));
        rep.sup_norm_mu_sq = std::max(rep.sup_norm_mu_sq, grid_norm_mu_sq(grid, gvals, spec.mu));
        rep.sup_norm_omega_sq = std::max(rep.sup_norm_omega_sq, grid_norm_omega_sq(grid, gvals));
    }
    {
        std::vector<double> shell_contrib(grid.shells, 0.0);
        for (size_t m = 0; m < grid.modes.size(); ++m) {
            const auto& md = grid.modes[m];
            const double gv = op_norm(spec.coupling(spec.s0 + spec.u_radius_s, md.k));
            shell_contrib[md.shell] +=
                md.weight * gv * gv / std::pow(md.k, 2.0 + 2.0 * spec.mu);
        }
        double ratio = 0.0;
        int count = 0;
        for (int j = 1; j + 2 < grid.shells; ++j) {  // skip the clipped edge cells
            if (shell_contrib[j] > 0.0) {
                ratio += shell_contrib[j + 1] / shell_contrib[j];
                ++count;
            }
        }
        rep.shell_ratio = count > 0 ? ratio / count : 0.0;
        rep.hyp1_pass = rep.shell_ratio < 0.999 && std::isfinite(rep.sup_norm_mu_sq);
    }

    // Hypothesis 2: isolated non-degenerate atomic ground state at s0.
    {
        Eigen::SelfAdjointEigenSolver<Mat> es(spec.h_at(spec.s0));
        rep.gap = spec.atom_dim() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0)
                                      : std::numeric_limits<double>::infinity();
        rep.hyp2_pass = rep.gap > 0.0;
    }

    // Hypothesis 3: |E_at(s) - z| < 1/2 and the q-uniform reduced resolvent
    // bound, sampled on a q-grid; the q -> infinity limit of the norm is
    // ||Pbar||, so the grid tail is a faithful stand-in for the sup.
    rep.hyp3_pass = true;
    std::vector<double> qgrid;
    for (double q = 0.0; q <= 8.0; q += 0.25) qgrid.push_back(q);
    for (double q : {12.0, 20.0, 50.0}) qgrid.push_back(q);
    for (const auto& [s, z] : samples) {
        const AtomicData at = atomic_projection(spec, s);
        rep.sup_e_dist = std::max(rep.sup_e_dist, std::abs(at.e_at - z));
        const Mat pbar = Mat::Identity(spec.atom_dim(), spec.atom_dim()) - at.p_at;
        const Mat hat = spec.h_at(s);
        for (double q : qgrid) {
            const Mat a = hat - (z - q) * Mat::Identity(spec.atom_dim(), spec.atom_dim());
            if (sigma_min(a) < 1e-10) {
                rep.hyp3_pass = false;
                continue;
            }
            rep.sup_q_resolvent =
                std::max(rep.sup_q_resolvent, (q + 1.0) * op_norm(a.inverse() * pbar));
        }
    }
    if (rep.sup_e_dist >= 0.5 || !std::isfinite(rep.sup_q_resolvent)) rep.hyp3_pass = false;

    // Lemma-level resolvent sups on the truncated tensor space (eigenframe).
    for (const auto& [s, z] : samples) {
        const AtomicData at = atomic_projection(spec, s);
        const Index da = spec.atom_dim(), df = basis.dim(), n = da * df;
        RVec chibar(n);
        Vec resolvent_diag(n);
        bool singular = false;
        for (Index ia = 0; ia < da; ++ia)
            for (Index j = 0; j < df; ++j) {
                const Index idx = ia * df + j;
                chibar(idx) = (ia == 0) ? chibar_shape(basis.hf[j], 1.0) : 1.0;
                const Complex den = at.eigs(ia) + basis.hf[j] - z;
                if (chibar(idx) != 0.0 && std::abs(den) < 1e-12) singular = true;
                resolvent_diag(idx) = chibar(idx) != 0.0 ? chibar(idx) / den : Complex(0.0);
            }
        if (singular) {
            rep.hyp3_pass = false;
            continue;
        }
        double m1 = 0.0;
        for (Index ia = 0; ia < da; ++ia)
            for (Index j = 0; j < df; ++j)
                m1 = std::max(m1, (basis.hf[j] + 1.0) * std::abs(resolvent_diag(ia * df + j)));
        rep.lem8_hf = std::max(rep.lem8_hf, m1);

        Mat w = interaction(spec, s, basis);
        Mat w_frame = Mat::Zero(n, n);
        for (Index ra = 0; ra < da; ++ra)
            for (Index ca = 0; ca < da; ++ca) {
                Mat block = Mat::Zero(df, df);
                for (Index ia = 0; ia < da; ++ia)
                    for (Index ja = 0; ja < da; ++ja)
                        block += at.v_inv(ra, ia) * at.v(ja, ca) * w.block(ia * df, ja * df, df, df);
                w_frame.block(ra * df, ca * df, df, df) = block;
            }
        const Mat res = resolvent_diag.asDiagonal();
        rep.lem8_w_right = std::max(rep.lem8_w_right, op_norm(w_frame * res));
        rep.lem8_w_left = std::max(rep.lem8_w_left, op_norm(res * w_frame));
    }

    rep.pass = rep.hyp1_pass && rep.hyp2_pass && rep.hyp3_pass;
    if (!rep.hyp1_pass)
        rep.failure = "Hypothesis 1";
    else if (!rep.hyp2_pass)
        rep.failure = "Hypothesis 2";
    else if (!rep.hyp3_pass)
        rep.failure = "Hypothesis 3";
    return rep;
}

double calibrate_g(const ModelSpec& spec, const ModeGrid& grid, const FockBasis& basis,
                   const CalibrationTargets& targets, double g_hi) {
    if (!(targets.alpha0 > 0.0 && targets.beta0 > 0.0 && targets.gamma0 > 0.0))
        throw SrgError("calibrate_g: targets must be positive");
    (void)grid;

    PolydiscParams p;
    p.alpha = targets.alpha0;
    p.beta = targets.beta0;
    p.gamma = targets.gamma0;
    p.rho = targets.rho;
    p.xi = targets.xi;
    p.mu = targets.mu;
    const auto red = basis.reduced_indices();

    Eigen::SelfAdjointEigenSolver<Mat> es(spec.h_at(spec.s0));
    const double e0 = es.eigenvalues()(0);
    const double rs = spec.u_radius_s, rz = spec.u_radius_z;
    const std::vector<Complex> ss = {spec.s0, spec.s0 + rs, Complex(spec.s0, rs)};
    const std::vector<Complex> zs = {e0, e0 - rz, e0 + rz};

    auto passes = [&](double g) {
        ModelSpec trial = spec;
        trial.g = g;
        for (const auto& s : ss)
            for (const auto& z : zs) {
                try {
                    const auto init = initial_effective(trial, s, z, basis);
                    const AtomicData at = init.atom;
                    const auto rep = polydisc_check(init.h0, at.e_at - z, p, basis, red);
                    if (!rep.member) return false;
                } catch (const SrgError&) {
                    return false;
                }
            }
        return true;
    };

    if (passes(g_hi)) return g_hi;
    double lo = 1e-8, hi = g_hi;
    if (!passes(lo)) throw SrgError("calibrate_g: no admissible g found");
    for (int it = 0; it < 40 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace srg
