#include "srg/rgloop.hpp"

#include <algorithm>
#include <cmath>

namespace srg {

Pipeline make_pipeline(const ModelSpec& spec, Complex s, const FockBasis& basis,
                       const RGConfig& cfg) {
    if (!(cfg.rho > 0.0 && cfg.rho < 0.8))
        throw SrgError("make_pipeline: rho must lie in (0, 4/5)");
    if (std::abs(cfg.rho - basis.grid.rho) > 1e-14)
        throw SrgError("make_pipeline: rg.rho must equal grid.rho");
    if (cfg.n_steps + 2 > basis.grid.shells) throw SrgError("insufficient shells for n_steps");

    Pipeline p;
    p.spec = spec;
    p.s = s;
    p.basis = basis;
    p.cfg = cfg;
    p.red = basis.reduced_indices();
    p.hf_red = RVec(p.red.size());
    for (size_t i = 0; i < p.red.size(); ++i) p.hf_red(static_cast<Index>(i)) = basis.hf[p.red[i]];

    // Gamma^* on H_red: shift every boson one shell down; a state occupying
    // the deepest shell has no image and is the truncation loss.
    const int a_nodes = basis.grid.angular;
    std::vector<Index> pos(basis.dim(), -1);
    for (size_t i = 0; i < p.red.size(); ++i) pos[p.red[i]] = static_cast<Index>(i);
    p.down.assign(p.red.size(), -1);
    for (size_t i = 0; i < p.red.size(); ++i) {
        const auto& occ = basis.states[p.red[i]];
        bool deepest = false;
        std::vector<int> target(occ.size(), 0);
        for (size_t m = 0; m < occ.size(); ++m) {
            if (occ[m] == 0) continue;
            if (basis.grid.modes[m].shell == basis.grid.shells - 1) {
                deepest = true;
                break;
            }
            target[m + a_nodes] = occ[m];
        }
        if (deepest) continue;
        p.down[i] = pos[basis.index.at(target)];
    }

    p.e_at = atomic_projection(spec, s).e_at;
    return p;
}

StepResult renorm_step(const Mat& h, const Pipeline& pipe) {
    const Index n = pipe.dim();
    const double rho = pipe.cfg.rho;

    StepResult out;
    out.ext = extract_diag(h, pipe.basis, pipe.red);

    Mat t = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) t(i, i) = out.ext.w00_at(pipe.hf_red(i));
    const CutoffPair cut = make_cutoffs(pipe.hf_red, rho);

    FeshbachResult fr = feshbach_map(h, t, cut);
    out.pair = fr.condition;
    out.q = std::move(fr.q);

    const Mat phi = fr.f - t;  // coupling part, supported inside supp chi_rho

    // leakage: coupling entries outside the range of the shell shift
    std::vector<bool> in_range(n, false);
    for (Index i = 0; i < n; ++i)
        if (pipe.down[i] >= 0) in_range[pipe.down[i]] = true;
    Mat masked = phi;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (in_range[i] && in_range[j]) masked(i, j) = 0.0;
    out.leakage = op_norm(masked);
    if (out.leakage > pipe.cfg.leak_bound)
        throw SrgError("renorm_step: insufficient shells (leakage above bound)");

    out.h_next = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        out.h_next(i, i) = out.ext.w00_at(rho * pipe.hf_red(i)) / rho;
    for (Index i = 0; i < n; ++i) {
        if (pipe.down[i] < 0) continue;
        for (Index j = 0; j < n; ++j) {
            if (pipe.down[j] < 0) continue;
            out.h_next(i, j) += phi(pipe.down[i], pipe.down[j]) / rho;
        }
    }
    return out;
}

Complex e_of_z(const Mat& h) { return h(0, 0); }

Chain build_chain(const Pipeline& pipe, Complex z, int n_levels, bool cache_q) {
    Chain c;
    c.z = z;
    c.init = initial_effective(pipe.spec, pipe.s, z, pipe.basis);
    c.h.push_back(c.init.h0);
    c.rec.push_back(LevelRecord{});
    c.rec[0].e = e_of_z(c.h[0]);
    c.rec[0].u_ok = true;

    const double thr = pipe.cfg.threshold();
    for (int k = 1; k <= n_levels; ++k) {
        StepResult st;
        try {
            st = renorm_step(c.h.back(), pipe);
        } catch (const SrgError& err) {
            throw SrgError(std::string(err.what()) + " (at level " + std::to_string(k) + ")");
        }
        LevelRecord& prev = c.rec.back();
        prev.gamma_proxy = st.ext.offdiag_gamma_proxy;
        prev.leakage = st.leakage;
        prev.pair = st.pair;
        if (cache_q) c.q.push_back(st.q);

        c.h.push_back(std::move(st.h_next));
        LevelRecord rec;
        rec.e = e_of_z(c.h.back());
        rec.e_recursion_residual = std::abs(rec.e - prev.e / pipe.cfg.rho);
        rec.u_ok = std::abs(prev.e) <= thr;  // z in U_k iff |E^(k-1)(z)| below threshold
        c.rec.push_back(rec);
    }

    // gamma proxy of the last level, and its Q when the caller needs the
    // eigenvector chain one level deeper than the iteration itself
    try {
        StepResult last = renorm_step(c.h.back(), pipe);
        c.rec.back().gamma_proxy = last.ext.offdiag_gamma_proxy;
        c.rec.back().leakage = last.leakage;
        c.rec.back().pair = last.pair;
        if (cache_q) c.q.push_back(last.q);
    } catch (const SrgError&) {
        // diagnostics only; the chain itself is complete
        c.rec.back().gamma_proxy = extract_diag(c.h.back(), pipe.basis, pipe.red).offdiag_gamma_proxy;
    }
    return c;
}

Complex level_function(const Pipeline& pipe, int n, Complex z, std::vector<int>* u_violations) {
    Chain c;
    c.z = z;
    c.init = initial_effective(pipe.spec, pipe.s, z, pipe.basis);
    Mat h = c.init.h0;
    Complex e_prev = e_of_z(h);
    const double thr = pipe.cfg.threshold();
    for (int k = 1; k <= n; ++k) {
        if (std::abs(e_prev) > thr && u_violations) u_violations->push_back(k);
        StepResult st;
        try {
            st = renorm_step(h, pipe);
        } catch (const SrgError& err) {
            throw SrgError(std::string(err.what()) + " (at level " + std::to_string(k) + ")");
        }
        h = std::move(st.h_next);
        e_prev = e_of_z(h);
    }
    return e_prev;
}

ZeroResult find_zero(const Pipeline& pipe, int n, Complex z_start) {
    ZeroResult out;
    const double rho = pipe.cfg.rho;
    const double h_fd = 1e-7 * rho;
    Complex z = z_start;

    auto f = [&](Complex zz) { return level_function(pipe, n, zz); };

    Complex fz = f(z);
    out.samples.emplace_back(z, fz);
    for (int it = 0; it < pipe.cfg.newton_max; ++it) {
        if (std::abs(fz) <= pipe.cfg.zero_tol) {
            out.converged = true;
            break;
        }
        const Complex fp = (f(z + h_fd) - f(z - h_fd)) / (2.0 * h_fd);
        if (fp == Complex(0.0, 0.0)) break;
        Complex step = -fz / fp;
        Complex z_new = z + step;
        if (std::abs(z_new - pipe.e_at) > 0.98 * rho) {  // stay inside B(E_at, rho)
            z_new = pipe.e_at + (z_new - pipe.e_at) * (0.98 * rho / std::abs(z_new - pipe.e_at));
        }
        z = z_new;
        fz = f(z);
        out.samples.emplace_back(z, fz);
        out.iterations = it + 1;
    }

    // bisection fallback on the real axis, where dE/dx < 0 is guaranteed
    if (!out.converged && std::abs(z.imag()) < 1e-13 && std::abs(pipe.s.imag()) < 1e-13) {
        double a = z.real(), b = z.real();
        double fa = f(Complex(a, 0.0)).real(), fb = fa;
        double spread = 0.05 * rho;
        for (int k = 0; k < 60 && fa * fb >= 0.0; ++k) {
            a -= spread;
            b += spread;
            fa = f(Complex(a, 0.0)).real();
            fb = f(Complex(b, 0.0)).real();
            spread *= 1.5;
        }
        if (fa > 0.0 && fb < 0.0) {
            for (int k = 0; k < 200; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = f(Complex(m, 0.0)).real();
                (fm > 0.0 ? a : b) = m;
                if (std::abs(fm) <= pipe.cfg.zero_tol) break;
            }
            z = Complex(0.5 * (a + b), 0.0);
            fz = f(z);
            out.samples.emplace_back(z, fz);
            out.converged = std::abs(fz) <= 10.0 * pipe.cfg.zero_tol;
        }
    }

    out.z = z;
    out.e = fz;
    return out;
}

RGTrace run(const Pipeline& pipe) {
    RGTrace tr;
    Complex z_prev = pipe.e_at;
    for (int n = 0; n <= pipe.cfg.n_steps; ++n) {
        ZeroResult zr = find_zero(pipe, n, z_prev);
        if (!zr.converged) tr.converged = false;
        tr.z.push_back(zr.z);
        tr.zero_samples.push_back(std::move(zr.samples));
        z_prev = zr.z;
    }
    tr.z_infinity = tr.z.back();

    Chain chain = build_chain(pipe, tr.z_infinity, pipe.cfg.n_steps, false);
    tr.levels = chain.rec;

    // empirical contraction constants fitted from the measured trace
    double c_beta = 0.0, c_gamma = 0.0;
    const double rho = pipe.cfg.rho;
    for (size_t nn = 1; nn < tr.levels.size(); ++nn) {
        const double gprev = tr.levels[nn - 1].gamma_proxy;
        if (gprev > 1e-300)
            c_beta = std::max(c_beta, rho * tr.levels[nn].e_recursion_residual / (gprev * gprev));
        if (gprev > 1e-14 * std::max(1.0, tr.levels[0].gamma_proxy))
            c_gamma = std::max(c_gamma, tr.levels[nn].gamma_proxy / gprev / std::pow(rho, pipe.spec.mu));
    }
    tr.c_beta_emp = c_beta;
    tr.c_gamma_emp = c_gamma;

    const double xi = pipe.cfg.polydisc.xi > 0.0 ? pipe.cfg.polydisc.xi : pipe.cfg.polydisc.xi_locked();
    LedgerConstants emp;
    emp.c_chi = pipe.cfg.polydisc.c_chi;
    emp.c_beta = c_beta > 0.0 ? c_beta : 1.5;
    emp.c_gamma = c_gamma > 0.0 ? c_gamma : 1.0;
    emp.xi = xi;
    const double gamma0 = tr.levels.empty() ? 0.0 : tr.levels[0].gamma_proxy / xi;
    const double alpha0 = std::abs(tr.levels.empty() ? 0.0 : std::abs(tr.levels[0].e));
    const ParameterLedger led = parameter_ledger(emp, rho, pipe.spec.mu, alpha0,
                                                 pipe.cfg.polydisc.beta, gamma0, pipe.cfg.n_steps);
    if (led.contractive && led.epsilon > 0.0)
        tr.z_error_bound = std::pow(rho, pipe.cfg.n_steps) * led.z_convergence_constant;
    return tr;
}

EigenvectorResult eigenvector(const Pipeline& pipe, const Chain& chain, int depth) {
    if (chain.q.size() < static_cast<size_t>(depth) + 1)
        throw SrgError("eigenvector: chain was built without cached Q operators");
    const Index n = pipe.dim();

    auto gamma_star = [&](const Vec& v, double* leak) {
        Vec out = Vec::Zero(n);
        double lost = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (pipe.down[i] >= 0)
                out(pipe.down[i]) = v(i);
            else
                lost += std::norm(v(i));
        }
        if (leak) *leak += std::sqrt(lost);
        return out;
    };

    EigenvectorResult res;
    Vec omega = Vec::Zero(n);
    omega(0) = 1.0;

    auto phi_0l = [&](int l, double* leak) {
        Vec v = chain.q[l] * omega;
        for (int k = l - 1; k >= 0; --k) v = chain.q[k] * gamma_star(v, leak);
        return v;
    };

    Vec prev = phi_0l(0, nullptr);
    for (int l = 1; l <= depth; ++l) {
        const Vec cur = phi_0l(l, nullptr);
        res.increments.push_back((cur - prev).norm());
        prev = cur;
    }
    res.phi0 = phi_0l(depth, &res.gamma_star_leak);
    res.norm_phi0 = res.phi0.norm();
    res.low_norm_flag = res.norm_phi0 < 0.5;
    res.residual_h0 = (chain.h[0] * res.phi0).norm() / res.norm_phi0;

    // Step-1 constant C = (8/rho) xi/(1-xi) exp((8/rho) xi/(1-xi) sum gamma)
    const double rho = pipe.cfg.rho;
    const double xi = pipe.cfg.polydisc.xi > 0.0 ? pipe.cfg.polydisc.xi : pipe.cfg.polydisc.xi_locked();
    double gamma_sum = 0.0, gamma_last = 0.0, ratio = 0.0;
    for (size_t k = 0; k < chain.rec.size(); ++k) {
        const double g = chain.rec[k].gamma_proxy / xi;
        gamma_sum += g;
        if (k + 1 == chain.rec.size()) gamma_last = g;
        if (k > 0 && chain.rec[k - 1].gamma_proxy > 0.0)
            ratio = std::max(ratio, chain.rec[k].gamma_proxy / chain.rec[k - 1].gamma_proxy);
    }
    const double base = (8.0 / rho) * xi / (1.0 - xi);
    res.tail_constant = base * std::exp(base * gamma_sum);
    const double tail_sum = ratio < 1.0 ? gamma_last * ratio / (1.0 - ratio) : gamma_last;
    res.tail_bound = res.tail_constant * tail_sum;

    // lift to atom (x) Fock through the initial Feshbach pair
    const Index da = pipe.spec.atom_dim();
    const Index df = pipe.basis.dim();
    Vec embedded = Vec::Zero(da * df);
    for (Index i = 0; i < n; ++i) embedded(pipe.red[i]) = res.phi0(i);  // atom slot 0 in the frame
    const Vec psi_frame = chain.init.q_frame * embedded;
    res.psi = Vec::Zero(da * df);
    for (Index ia = 0; ia < da; ++ia)
        for (Index ja = 0; ja < da; ++ja) {
            if (chain.init.atom.v(ia, ja) == Complex(0.0, 0.0)) continue;
            res.psi.segment(ia * df, df) += chain.init.atom.v(ia, ja) * psi_frame.segment(ja * df, df);
        }
    const Mat hg = assemble_H(pipe.spec, pipe.s, pipe.basis);
    res.residual_full =
        ((hg - chain.z * Mat::Identity(da * df, da * df)) * res.psi).norm() / res.psi.norm();
    return res;
}

GapReport gap_check(const Pipeline& pipe, Complex z_infinity, int n_levels) {
    GapReport rep;
    const double rho = pipe.cfg.rho;
    const double z0 = z_infinity.real();

    const double lo = z0 - rho / 4.0, hi = z0 - 1e-4;
    rep.window_clear = true;
    for (int i = 0; i < 10; ++i) {
        const double x = lo + (hi - lo) * i / 9.0;
        const Mat h0 = initial_effective(pipe.spec, pipe.s, Complex(x, 0.0), pipe.basis).h0;
        const double sm = sigma_min(h0);
        rep.x.push_back(x);
        rep.sigma_min_h0.push_back(sm);
        if (!(sm > 0.0)) rep.window_clear = false;
    }

    rep.monotone = true;
    for (int lvl = 0; lvl <= n_levels; ++lvl) {
        // five points inside U_{n+1} on the real axis: pick a half-width from
        // the local slope so |E^(n)| stays below rho/2
        const double h_fd = 1e-7 * rho;
        const Complex d =
            (level_function(pipe, lvl, Complex(z0 + h_fd, 0)) - level_function(pipe, lvl, Complex(z0 - h_fd, 0))) /
            (2.0 * h_fd);
        const double halfwidth = 0.35 * rho / std::abs(d);
        std::vector<double> xs, ds;
        for (double c : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const double x = z0 + c * halfwidth;
            const double hh = 1e-4 * halfwidth;
            const Complex ep = level_function(pipe, lvl, Complex(x + hh, 0));
            const Complex em = level_function(pipe, lvl, Complex(x - hh, 0));
            const double der = (ep - em).real() / (2.0 * hh);
            xs.push_back(x);
            ds.push_back(der);
            if (!(der < 0.0)) rep.monotone = false;
        }
        rep.mono_x.push_back(xs);
        rep.mono_derivative.push_back(ds);
    }

    // eq-lowerbound spot check at the top level, at a point with |E| >= rho/2
    {
        const int lvl = n_levels;
        const double h_fd = 1e-7 * rho;
        const Complex d =
            (level_function(pipe, lvl, Complex(z0 + h_fd, 0)) - level_function(pipe, lvl, Complex(z0 - h_fd, 0))) /
            (2.0 * h_fd);
        double x = z0 - 0.6 * rho / std::abs(d);  // E^(n)(x) ~ +0.6 rho > rho/2
        Chain c = build_chain(pipe, Complex(x, 0.0), lvl, false);
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (c.h.back() + Mat(c.h.back().adjoint()))));
        rep.spot_lambda_min = es.eigenvalues()(0);
        rep.spot_lower_bound = c.rec.back().e.real() - c.rec.back().gamma_proxy;
        rep.spot_ok = rep.spot_lambda_min >= rep.spot_lower_bound - 1e-10;
    }
    return rep;
}

HfLimitReport hf_limit_check(const Pipeline& pipe, const Chain& chain) {
    HfLimitReport rep;
    const Index n = pipe.dim();
    double hf_sq = 0.0;
    for (Index i = 0; i < n; ++i) hf_sq += pipe.hf_red(i) * pipe.hf_red(i);
    for (const auto& h : chain.h) {
        Complex num = 0.0;
        for (Index i = 0; i < n; ++i) num += pipe.hf_red(i) * h(i, i);
        const Complex lam = num / hf_sq;
        Mat r = h;
        for (Index i = 0; i < n; ++i) r(i, i) -= lam * pipe.hf_red(i);
        rep.lambda.push_back(lam.real());
        rep.residual.push_back(r.norm());
    }
    for (size_t i = 0; i + 1 < rep.lambda.size(); ++i)
        rep.cauchy.push_back(std::abs(rep.lambda[i + 1] - rep.lambda[i]));
    return rep;
}

}  // namespace srg
