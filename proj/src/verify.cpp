#include "srg/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>

namespace srg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Complex ContourSpec::point(int j) const {
    const double th = 2.0 * kPi * j / points;
    return center + radius * Complex(std::cos(th), std::sin(th));
}

GroundState direct_ground(const ModelSpec& spec, double s, const FockBasis& basis) {
    const Mat h = assemble_H(spec, s, basis);
    if ((h - Mat(h.adjoint())).norm() > 1e-10 * h.norm())
        throw SrgError("direct_ground: Hamiltonian not Hermitian (is s real?)");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + Mat(h.adjoint())));
    GroundState g;
    g.e_min = es.eigenvalues()(0);
    g.vector = es.eigenvectors().col(0);
    return g;
}

LoopResult cauchy_loop(const std::vector<Complex>& f_samples, const ContourSpec& contour) {
    if (static_cast<int>(f_samples.size()) != contour.points)
        throw SrgError("cauchy_loop: one sample per contour point required");
    LoopResult out;
    double fmax = 0.0;
    Complex acc = 0.0;
    for (int j = 0; j < contour.points; ++j) {
        const double th = 2.0 * kPi * j / contour.points;
        const Complex ds = Complex(0.0, 1.0) * contour.radius * Complex(std::cos(th), std::sin(th));
        acc += f_samples[j] * ds * (2.0 * kPi / contour.points);
        fmax = std::max(fmax, std::abs(f_samples[j]));
    }
    out.integral = acc;
    const double scale = 2.0 * kPi * contour.radius * std::max(fmax, 1e-300);
    out.normalized = std::abs(acc) / scale;
    return out;
}

namespace {

struct PointRun {
    Complex z_inf;
    Vec phi0;
    Vec psi;
    bool ok = false;
};

PointRun run_point(const ModelSpec& spec, const FockBasis& basis, const RGConfig& cfg, Complex s,
                   int depth) {
    PointRun pr;
    const Pipeline pipe = make_pipeline(spec, s, basis, cfg);
    const RGTrace tr = run(pipe);
    if (!tr.converged) return pr;
    const Chain chain = build_chain(pipe, tr.z_infinity, depth, true);
    const EigenvectorResult ev = eigenvector(pipe, chain, depth);
    pr.z_inf = tr.z_infinity;
    pr.phi0 = ev.phi0;
    pr.psi = ev.psi;
    pr.ok = true;
    return pr;
}

}  // namespace

AnalyticitySuite analyticity_suite(const ModelSpec& spec, const FockBasis& basis,
                                   const RGConfig& cfg, const ContourSpec& contour, int depth,
                                   int threads) {
    AnalyticitySuite suite;
    std::vector<PointRun> runs(contour.points);

    auto eval = [&](int j) { return run_point(spec, basis, cfg, contour.point(j), depth); };
    if (threads > 1) {
        std::vector<std::future<PointRun>> futs;
        for (int j = 0; j < contour.points; ++j)
            futs.push_back(std::async(std::launch::async, eval, j));
        for (int j = 0; j < contour.points; ++j) runs[j] = futs[j].get();
    } else {
        for (int j = 0; j < contour.points; ++j) runs[j] = eval(j);
    }

    for (int j = 0; j < contour.points; ++j) {
        if (!runs[j].ok) {
            suite.all_converged = false;
            if (suite.failed_point < 0) suite.failed_point = j;
        }
        suite.z_on_contour.push_back(runs[j].z_inf);
    }
    if (!suite.all_converged) return suite;

    suite.loop_z_infinity = cauchy_loop(suite.z_on_contour, contour).normalized;
    for (int c = 0; c < 5; ++c) {
        std::vector<Complex> phi_c(contour.points), psi_c(contour.points);
        for (int j = 0; j < contour.points; ++j) {
            phi_c[j] = runs[j].phi0(c);
            psi_c[j] = runs[j].psi(c);
        }
        suite.loop_phi_coords.push_back(cauchy_loop(phi_c, contour).normalized);
        suite.loop_psi_coords.push_back(cauchy_loop(psi_c, contour).normalized);
    }

    // central-difference Cauchy-Riemann residual at the center
    {
        const double h = contour.radius / 5.0;
        const Complex c = contour.center;
        const Complex fxp = run_point(spec, basis, cfg, c + h, depth).z_inf;
        const Complex fxm = run_point(spec, basis, cfg, c - h, depth).z_inf;
        const Complex fyp = run_point(spec, basis, cfg, c + Complex(0, h), depth).z_inf;
        const Complex fym = run_point(spec, basis, cfg, c - Complex(0, h), depth).z_inf;
        const Complex fx = (fxp - fxm) / (2.0 * h);
        const Complex fy = (fyp - fym) / (2.0 * h);
        suite.cauchy_riemann_residual = std::abs(fy - Complex(0, 1) * fx);
        suite.cauchy_riemann_scale = std::abs(fx);
    }

    // conjugation: z_inf(sbar) = conj(z_inf(s)) at the first off-axis point
    {
        const Complex s1 = contour.point(1);
        const PointRun pr = run_point(spec, basis, cfg, std::conj(s1), depth);
        suite.conj_symmetry = std::abs(pr.z_inf - std::conj(suite.z_on_contour[1]));
    }
    return suite;
}

namespace {

// eigenvalue count below x for a symmetric tridiagonal matrix (Sturm sequence)
int count_below(const std::vector<double>& d, double e, double x) {
    int count = 0;
    double q = 1.0;
    const double e2 = e * e;
    for (size_t i = 0; i < d.size(); ++i) {
        q = (i == 0) ? d[0] - x : d[i] - x - e2 / q;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

double tridiag_min_eig(const std::vector<double>& d, double e) {
    double lo = d[0], hi = d[0];
    for (double v : d) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    lo -= 2.0 * std::abs(e) + 1.0;
    hi += 2.0 * std::abs(e) + 1.0;
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_below(d, e, mid) >= 1 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// inverse iteration with tridiagonal (Thomas) solves
std::vector<double> tridiag_eigvec(const std::vector<double>& d, double e, double lambda) {
    const size_t n = d.size();
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const double shift = lambda - 1e-10;
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> c(n), rhs = v;
        double beta = d[0] - shift;
        if (std::abs(beta) < 1e-300) beta = 1e-300;
        c[0] = e / beta;
        rhs[0] /= beta;
        for (size_t i = 1; i < n; ++i) {
            beta = d[i] - shift - e * c[i - 1];
            if (std::abs(beta) < 1e-300) beta = 1e-300;
            c[i] = e / beta;
            rhs[i] = (rhs[i] - e * rhs[i - 1]) / beta;
        }
        for (size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
        double nrm = 0.0;
        for (double x : rhs) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (size_t i = 0; i < n; ++i) v[i] = rhs[i] / nrm;
    }
    return v;
}

}  // namespace

std::vector<CounterexampleRow> counterexample_demo(const std::vector<double>& s_values, double box,
                                                   double step) {
    const int n = static_cast<int>(std::lround(2.0 * box / step)) - 1;  // interior points
    const double e_off = -1.0 / (step * step);

    std::vector<CounterexampleRow> rows;
    std::vector<double> prev_vec;
    bool prev_extra = false;

    for (size_t si = 0; si < s_values.size(); ++si) {
        const double s = s_values[si];
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) {
            const double x = -box + (i + 1) * step;
            d[i] = 2.0 / (step * step) + (std::abs(x) <= 1.0 ? s : 0.0);
        }
        const double lam = tridiag_min_eig(d, e_off);

        CounterexampleRow row;
        row.s = s;
        row.e_min = std::min(lam, 0.0);
        const bool extra = lam >= 0.0;  // ground state sits in the (+) 0 block

        if (si == 0) {
            row.overlap_prev = 1.0;
        } else if (extra != prev_extra) {
            row.overlap_prev = 0.0;  // blocks are orthogonal
        } else if (extra) {
            row.overlap_prev = 1.0;
        } else {
            const std::vector<double> v = tridiag_eigvec(d, e_off, lam);
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += prev_vec[i] * v[i];
            row.overlap_prev = std::abs(dot);
        }
        if (!extra) prev_vec = tridiag_eigvec(d, e_off, lam);
        prev_extra = extra;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace srg
