#include "srg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srg {

namespace {

Complex interp(const std::vector<double>& xs, const std::vector<Complex>& ys, double x) {
    if (xs.size() < 2) throw SrgError("kernel interpolation: need at least two samples");
    if (x < xs.front() - 1e-12 || x > xs.back() + 1e-12)
        throw SrgError("kernel interpolation: r_grid does not cover the requested point");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t hi = std::min(static_cast<size_t>(it - xs.begin()), xs.size() - 1);
    if (hi == 0) hi = 1;
    const size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

int tuple_size(int m, int n) { return m + n; }

}  // namespace

Complex KernelSequence::w00_at(double r) const { return interp(r_grid, w00, r); }

double PolydiscParams::xi_locked() const { return std::sqrt(rho) / (4.0 * c_chi); }

Mat op_from_kernels(const KernelSequence& w, const FockBasis& basis) {
    const auto red = basis.reduced_indices();
    const Index nred = static_cast<Index>(red.size());
    const int mcount = basis.grid.mode_count();

    for (const auto& kv : w.wmn)
        if (kv.first.first + kv.first.second > 2)
            throw SrgError("op_from_kernels: kernel order above 2 rejected");

    std::vector<Index> pos(basis.dim(), -1);  // full index -> reduced position
    for (Index i = 0; i < nred; ++i) pos[red[i]] = i;

    Mat h = Mat::Zero(nred, nred);
    for (Index i = 0; i < nred; ++i) h(i, i) = w.w00_at(basis.hf[red[i]]);

    auto weight_sqrt = [&](int m) { return std::sqrt(basis.grid.modes[m].weight); };

    for (const auto& kv : w.wmn) {
        const int m = kv.first.first, n = kv.first.second;
        if (m + n == 0) continue;
        const auto& vals = kv.second;
        const int slots = tuple_size(m, n);
        const int ntuples = static_cast<int>(std::pow(mcount, slots));
        for (int tup = 0; tup < ntuples; ++tup) {
            std::vector<int> slot(slots);
            int t = tup;
            for (int s = slots - 1; s >= 0; --s) {
                slot[s] = t % mcount;
                t /= mcount;
            }
            std::vector<Complex> samples(w.r_grid.size());
            for (size_t ri = 0; ri < w.r_grid.size(); ++ri) samples[ri] = vals[ri][tup];

            double wfac = 1.0;
            for (int s = 0; s < slots; ++s) wfac *= weight_sqrt(slot[s]);

            // act on each reduced source state: annihilation slots right-to-left,
            // the kernel as a function of H_f in between, then creation slots
            for (Index jc = 0; jc < nred; ++jc) {
                std::vector<int> occ = basis.states[red[jc]];
                double amp = 1.0;
                bool dead = false;
                for (int s = slots - 1; s >= m; --s) {  // annihilation block
                    const int md = slot[s];
                    if (occ[md] == 0) {
                        dead = true;
                        break;
                    }
                    amp *= std::sqrt(static_cast<double>(occ[md]));
                    occ[md] -= 1;
                }
                if (dead) continue;
                double hf_mid = 0.0;
                for (int q = 0; q < mcount; ++q) hf_mid += occ[q] * basis.grid.modes[q].k;
                const Complex kernel_val = interp(w.r_grid, samples, hf_mid);
                for (int s = m - 1; s >= 0; --s) {  // creation block
                    const int md = slot[s];
                    occ[md] += 1;
                    amp *= std::sqrt(static_cast<double>(occ[md]));
                }
                auto it = basis.index.find(occ);
                if (it == basis.index.end()) continue;
                const Index tgt = pos[it->second];
                if (tgt < 0) continue;  // outside H_red: P_red sandwich
                h(tgt, jc) += wfac * amp * kernel_val;
            }
        }
    }
    return h;
}

double norm_mu(const KernelSequence& w, const ModeGrid& grid, int m, int n) {
    if (m == 0 && n == 0) {
        double sup = 0.0, dsup = 0.0;
        for (const auto& v : w.w00) sup = std::max(sup, std::abs(v));
        for (const auto& v : w.w00_deriv) dsup = std::max(dsup, std::abs(v));
        return sup + dsup;
    }
    auto it = w.wmn.find({m, n});
    if (it == w.wmn.end()) return 0.0;
    const auto& vals = it->second;
    const auto dit = w.wmn_deriv.find({m, n});
    const int slots = m + n;
    const int mcount = grid.mode_count();
    const size_t ntuples = vals.empty() ? 0 : vals[0].size();
    if (ntuples != static_cast<size_t>(std::pow(mcount, slots)))
        throw SrgError("norm_mu: kernel sampling does not match the grid");

    double acc = 0.0;
    for (size_t tup = 0; tup < ntuples; ++tup) {
        size_t t = tup;
        double wfac = 1.0;
        for (int s = 0; s < slots; ++s) {
            const auto& md = grid.modes[t % mcount];
            wfac *= md.weight / std::pow(md.k, 2.0 + 2.0 * w.mu);
            t /= mcount;
        }
        double sup = 0.0, dsup = 0.0;
        for (size_t ri = 0; ri < w.r_grid.size(); ++ri) {
            sup = std::max(sup, std::abs(vals[ri][tup]));
            if (dit != w.wmn_deriv.end()) dsup = std::max(dsup, std::abs(dit->second[ri][tup]));
        }
        const double c1 = sup + dsup;
        acc += wfac * c1 * c1;
    }
    return std::sqrt(acc);
}

double norm_mu_xi(const KernelSequence& w, const ModeGrid& grid) {
    double s = norm_mu(w, grid, 0, 0);
    for (const auto& kv : w.wmn) {
        const int m = kv.first.first, n = kv.first.second;
        if (m + n == 0) continue;
        s += std::pow(w.xi, -(m + n)) * norm_mu(w, grid, m, n);
    }
    return s;
}

Complex DiagonalExtraction::w00_at(double r) const { return interp(r_grid, w00, r); }

DiagonalExtraction extract_diag(const Mat& h_red, const FockBasis& basis,
                                const std::vector<Index>& red) {
    if (basis.grid.angular < 2)
        throw SrgError("extract_diag: need angular >= 2 to separate w00 from w11");
    const Index nred = static_cast<Index>(red.size());
    if (h_red.rows() != nred) throw SrgError("extract_diag: dimension mismatch");

    std::vector<Index> pos(basis.dim(), -1);
    for (Index i = 0; i < nred; ++i) pos[red[i]] = i;

    DiagonalExtraction out;
    const int shells = basis.grid.shells;
    const int a_nodes = basis.grid.angular;
    out.r_grid.resize(static_cast<size_t>(shells) + 1);
    out.w00.resize(static_cast<size_t>(shells) + 1);

    out.r_grid[0] = 0.0;
    out.w00[0] = h_red(0, 0);  // vacuum is reduced state 0

    // ascending radii: shell J-1 first
    for (int j = shells - 1; j >= 0; --j) {
        const size_t slot = static_cast<size_t>(shells - j);
        out.r_grid[slot] = basis.grid.radius(j);

        Complex diag_sum = 0.0, off_sum = 0.0;
        int off_count = 0;
        for (int a = 0; a < a_nodes; ++a) {
            std::vector<int> occ(basis.grid.mode_count(), 0);
            occ[j * a_nodes + a] = 1;
            const Index ia = pos[basis.index.at(occ)];
            diag_sum += h_red(ia, ia);
            for (int a2 = 0; a2 < a_nodes; ++a2) {
                if (a2 == a) continue;
                std::vector<int> occ2(basis.grid.mode_count(), 0);
                occ2[j * a_nodes + a2] = 1;
                const Index ib = pos[basis.index.at(occ2)];
                off_sum += h_red(ia, ib);
                ++off_count;
            }
        }
        const Complex w11_est = off_sum / static_cast<double>(off_count);  // weight * w11(0,k,k)
        out.w00[slot] = diag_sum / static_cast<double>(a_nodes) - w11_est;
    }

    out.w00_deriv.resize(out.w00.size() - 1);
    for (size_t i = 0; i + 1 < out.w00.size(); ++i)
        out.w00_deriv[i] = (out.w00[i + 1] - out.w00[i]) / (out.r_grid[i + 1] - out.r_grid[i]);

    Mat diag = Mat::Zero(nred, nred);
    for (Index i = 0; i < nred; ++i) diag(i, i) = out.w00_at(basis.hf[red[i]]);
    out.offdiag_gamma_proxy = op_norm(h_red - diag);
    return out;
}

PolydiscReport polydisc_check(const Mat& h_red, Complex expected_e, const PolydiscParams& p,
                              const FockBasis& basis, const std::vector<Index>& red) {
    PolydiscReport rep;
    const auto ext = extract_diag(h_red, basis, red);
    rep.w00_zero = ext.w00[0];
    rep.alpha_value = std::abs(ext.w00[0] - expected_e);
    rep.beta_value = 0.0;
    for (const auto& d : ext.w00_deriv) rep.beta_value = std::max(rep.beta_value, std::abs(d - 1.0));
    rep.gamma_proxy = ext.offdiag_gamma_proxy;
    const double xi = p.xi > 0.0 ? p.xi : p.xi_locked();
    rep.gamma_bound = xi * p.gamma;
    rep.alpha_ok = rep.alpha_value <= p.alpha;
    rep.beta_ok = rep.beta_value <= p.beta;
    rep.gamma_ok = rep.gamma_proxy <= rep.gamma_bound;

    const Index nred = static_cast<Index>(red.size());
    Mat t = Mat::Zero(nred, nred);
    RVec spec(nred);
    for (Index i = 0; i < nred; ++i) {
        spec(i) = basis.hf[red[i]];
        t(i, i) = ext.w00_at(spec(i));
    }
    rep.pair = check_pair(h_red, t, make_cutoffs(spec, p.rho));
    rep.member = rep.alpha_ok && rep.beta_ok && rep.gamma_ok && rep.pair.pass;
    return rep;
}

LedgerConstants locked_constants(double rho, double c_chi) {
    LedgerConstants c;
    c.c_chi = c_chi;
    c.c_beta = 1.5 * c_chi;
    c.c_gamma = 128.0 * c_chi * c_chi;
    c.xi = std::sqrt(rho) / (4.0 * c_chi);
    return c;
}

ParameterLedger parameter_ledger(const LedgerConstants& c, double rho, double mu, double alpha0,
                                 double beta0, double gamma0, int n_steps) {
    ParameterLedger led;
    led.constants = c;
    led.rho = rho;
    led.mu = mu;

    const double contraction = c.c_gamma * std::pow(rho, mu);
    led.contractive = contraction < 1.0;
    if (!led.contractive) {
        std::ostringstream os;
        os << "iteration not contractive: C_gamma * rho^mu = " << contraction << " >= 1";
        led.refusal = os.str();
        return led;
    }

    led.alpha.resize(n_steps + 1);
    led.beta.resize(n_steps + 1);
    led.gamma.resize(n_steps + 1);
    led.alpha[0] = alpha0;
    led.beta[0] = beta0;
    led.gamma[0] = gamma0;
    double sum_sq = 0.0;
    for (int n = 1; n <= n_steps; ++n) {
        led.gamma[n] = std::pow(contraction, n) * gamma0;
        sum_sq += std::pow(contraction, 2 * (n - 1));
        led.beta[n] = beta0 + (c.c_beta / rho) * sum_sq * gamma0 * gamma0;
        led.alpha[n] = (c.c_beta / rho) * led.gamma[n - 1] * led.gamma[n - 1];
    }

    const double cap = rho / (8.0 * c.c_chi);
    led.beta0_ok = beta0 <= cap;
    led.gamma0_ok = gamma0 <= cap;
    led.sum_condition_ok =
        beta0 + (c.c_beta / rho) / (1.0 - contraction * contraction) * gamma0 * gamma0 <= cap;
    led.alpha0_ok = alpha0 < rho / 2.0;
    led.rho_ok = rho < 0.8;
    led.admissible =
        led.beta0_ok && led.gamma0_ok && led.sum_condition_ok && led.alpha0_ok && led.rho_ok;
    if (!led.admissible && led.refusal.empty()) {
        std::ostringstream os;
        os << "admissibility failed:";
        if (!led.beta0_ok) os << " beta0 > rho/(8 C_chi);";
        if (!led.gamma0_ok) os << " gamma0 > rho/(8 C_chi);";
        if (!led.sum_condition_ok) os << " beta0 + (C_beta/rho) gamma0^2/(1-(C_gamma rho^mu)^2) > rho/(8 C_chi);";
        if (!led.alpha0_ok) os << " alpha0 >= rho/2;";
        if (!led.rho_ok) os << " rho >= 4/5;";
        led.refusal = os.str();
    }

    const double alpha1 = n_steps >= 1 ? led.alpha[1] : (c.c_beta / rho) * gamma0 * gamma0;
    led.epsilon = 0.5 - rho / 2.0 - alpha1;
    const double alpha_tail =
        alpha0 + (c.c_beta / rho) * gamma0 * gamma0 / (1.0 - contraction * contraction);
    if (led.epsilon > 0.0)
        led.z_convergence_constant = std::exp(alpha_tail / (2.0 * rho * led.epsilon * led.epsilon));
    return led;
}

std::string kernels_to_csv(const KernelSequence& w, const ModeGrid& grid) {
    std::ostringstream os;
    os.precision(17);
    os << "m,n,r,k1,k2,re,im\n";
    for (size_t ri = 0; ri < w.r_grid.size(); ++ri)
        os << "0,0," << w.r_grid[ri] << ",0,0," << w.w00[ri].real() << "," << w.w00[ri].imag()
           << "\n";
    for (const auto& kv : w.wmn) {
        const int m = kv.first.first, n = kv.first.second;
        const int slots = m + n;
        for (size_t ri = 0; ri < w.r_grid.size(); ++ri) {
            const auto& row = kv.second[ri];
            for (size_t tup = 0; tup < row.size(); ++tup) {
                size_t t = tup;
                std::vector<int> slot(slots);
                for (int s = slots - 1; s >= 0; --s) {
                    slot[s] = static_cast<int>(t % grid.modes.size());
                    t /= grid.modes.size();
                }
                os << m << "," << n << "," << w.r_grid[ri] << "," << grid.modes[slot[0]].k << ","
                   << (slots > 1 ? grid.modes[slot[1]].k : 0.0) << "," << row[tup].real() << ","
                   << row[tup].imag() << "\n";
            }
        }
    }
    return os.str();
}

}  // namespace srg
