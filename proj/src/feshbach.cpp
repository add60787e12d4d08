#include "srg/feshbach.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

namespace srg {

namespace {
constexpr double kPi = 3.14159265358979323846;

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

double smoothstep_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 6.0 * x * (1.0 - x);
}
}  // namespace

double chi_shape(double t, double rho) {
    const double u = (t - 0.75 * rho) / (0.25 * rho);
    return std::cos(0.5 * kPi * smoothstep(u));
}

double chibar_shape(double t, double rho) {
    const double u = (t - 0.75 * rho) / (0.25 * rho);
    return std::sin(0.5 * kPi * smoothstep(u));
}

double chibar_shape_deriv(double t, double rho) {
    const double u = (t - 0.75 * rho) / (0.25 * rho);
    return std::cos(0.5 * kPi * smoothstep(u)) * 0.5 * kPi * smoothstep_deriv(u) / (0.25 * rho);
}

CutoffPair CutoffPair::from_diagonals(const RVec& chi, const RVec& chibar, double rho) {
    CutoffPair c;
    c.chi = chi;
    c.chibar = chibar;
    c.rho = rho;
    for (Index i = 0; i < chibar.size(); ++i)
        if (chibar(i) != 0.0) c.support.push_back(i);
    return c;
}

CutoffPair make_cutoffs(const RVec& spectrum, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw SrgError("make_cutoffs: need 0 < rho <= 1");
    RVec chi(spectrum.size()), chibar(spectrum.size());
    for (Index i = 0; i < spectrum.size(); ++i) {
        chi(i) = chi_shape(spectrum(i), rho);
        chibar(i) = chibar_shape(spectrum(i), rho);
    }
    return CutoffPair::from_diagonals(chi, chibar, rho);
}

CutoffPair make_cutoffs(const FockBasis& basis, double rho) {
    RVec spec(basis.dim());
    for (Index i = 0; i < basis.dim(); ++i) spec(i) = basis.hf[i];
    return make_cutoffs(spec, rho);
}

namespace {

Mat diag_mult_left(const RVec& d, const Mat& a) { return d.cast<Complex>().asDiagonal() * a; }
Mat diag_mult_right(const Mat& a, const RVec& d) { return a * d.cast<Complex>().asDiagonal(); }

// Inverse of the restriction of a to the support coordinates, zero elsewhere.
Mat support_inverse(const Mat& a, const std::vector<Index>& support, double cond_limit,
                    double* cond_out) {
    Mat block = submatrix(a, support, support);
    Eigen::PartialPivLU<Mat> lu(block);
    Mat inv = lu.inverse();
    const double cond = op_norm(block) * op_norm(inv);
    if (cond_out) *cond_out = cond;
    if (!inv.allFinite() || cond > cond_limit)
        throw SrgError("feshbach_map: pair condition violated numerically (near-singular restricted block)");
    return embed(inv, support, a.rows());
}

}  // namespace

ConditionReport check_pair(const Mat& h, const Mat& t, const CutoffPair& cut) {
    if (h.rows() != t.rows() || h.cols() != t.cols())
        throw SrgError("check_pair: H and T dimensions differ");
    if (h.rows() != cut.chi.size()) throw SrgError("check_pair: cutoff dimension mismatch");

    ConditionReport rep;
    rep.commutator_chi = op_norm(diag_mult_left(cut.chi, t) - diag_mult_right(t, cut.chi));
    rep.commutator_chibar = op_norm(diag_mult_left(cut.chibar, t) - diag_mult_right(t, cut.chibar));
    const double tn = op_norm(t);
    if (rep.commutator_chi > 1e-10 * tn || rep.commutator_chibar > 1e-10 * tn)
        throw SrgError("check_pair: T does not commute with the cutoff pair (caller bug: T must be a function of H_f)");

    if (cut.support.empty()) {
        // chibar == 0 everywhere: nothing to invert, pass trivially
        rep.sigma_min_support = std::numeric_limits<double>::infinity();
        rep.pass = true;
        return rep;
    }

    Mat tbb = submatrix(t, cut.support, cut.support);
    rep.sigma_min_support = sigma_min(tbb);
    if (rep.sigma_min_support <= 1e-14 * std::max(1.0, tn)) {
        rep.pass = false;
        return rep;
    }

    const Mat w = h - t;
    Mat tinv = embed(Eigen::PartialPivLU<Mat>(tbb).inverse(), cut.support, t.rows());
    const Mat wbar = diag_mult_left(cut.chibar, diag_mult_right(w, cut.chibar));
    rep.neumann_left = op_norm(tinv * wbar);
    rep.neumann_right = op_norm(wbar * tinv);
    rep.cross_norm = op_norm(tinv * diag_mult_left(cut.chibar, diag_mult_right(w, cut.chi)));
    rep.pass = rep.neumann_left < 1.0 && rep.neumann_right < 1.0;
    return rep;
}

FeshbachResult feshbach_map(const Mat& h, const Mat& t, const CutoffPair& cut) {
    FeshbachResult res;
    res.condition = check_pair(h, t, cut);
    if (!res.condition.pass) throw SrgError("feshbach_map: pair condition check failed");

    const Mat w = h - t;
    const Index n = h.rows();
    const Mat hbar = t + diag_mult_left(cut.chibar, diag_mult_right(w, cut.chibar));
    if (cut.support.empty()) {
        res.hbar_inverse = Mat::Zero(n, n);
        res.f = t + diag_mult_left(cut.chi, diag_mult_right(w, cut.chi));
        res.q = cut.chi.cast<Complex>().asDiagonal();
        res.q_sharp = cut.chi.cast<Complex>().asDiagonal();
        return res;
    }

    res.hbar_inverse = support_inverse(hbar, cut.support, 1e12, nullptr);

    const Mat w_chi = diag_mult_right(w, cut.chi);            // W chi
    const Mat chi_w = diag_mult_left(cut.chi, w);             // chi W
    const Mat rbar = diag_mult_left(cut.chibar, diag_mult_right(res.hbar_inverse, cut.chibar));

    res.f = t + diag_mult_left(cut.chi, w_chi) - chi_w * rbar * w_chi;
    res.q = Mat(cut.chi.cast<Complex>().asDiagonal()) - rbar * w_chi;
    res.q_sharp = Mat(cut.chi.cast<Complex>().asDiagonal()) - chi_w * rbar;
    if (!res.f.allFinite() || !res.q.allFinite() || !res.q_sharp.allFinite())
        throw SrgError("feshbach_map: non-finite entries in result");
    return res;
}

std::array<double, 6> identity_residuals(const Mat& h, const Mat& t, const CutoffPair& cut,
                                         const FeshbachResult& r) {
    const Index n = h.rows();
    const Mat id = Mat::Identity(n, n);
    const Mat chi = cut.chi.cast<Complex>().asDiagonal();
    const Mat rbar = diag_mult_left(cut.chibar, diag_mult_right(r.hbar_inverse, cut.chibar));

    Mat tinv_bar = Mat::Zero(n, n);
    if (!cut.support.empty()) {
        Mat tbb = submatrix(t, cut.support, cut.support);
        tinv_bar = diag_mult_left(
            cut.chibar,
            diag_mult_right(embed(Eigen::PartialPivLU<Mat>(tbb).inverse(), cut.support, n),
                            cut.chibar));
    }

    std::array<double, 6> out{};
    out[0] = op_norm(rbar * h - (id - r.q * chi));
    out[1] = op_norm(h * rbar - (id - chi * r.q_sharp));
    out[2] = op_norm(tinv_bar * r.f - (id - chi * r.q));
    out[3] = op_norm(r.f * tinv_bar - (id - r.q_sharp * chi));
    out[4] = op_norm(h * r.q - chi * r.f);
    out[5] = op_norm(r.q_sharp * h - r.f * chi);
    return out;
}

IsospectralityReport isospectrality_check(const Mat& h, const Mat& t, const CutoffPair& cut,
                                          const FeshbachResult& r, double tol_scale) {
    IsospectralityReport rep;
    rep.sigma_min_h = sigma_min(h);

    // F preserves the chi-support coordinate subspace; restrict there.
    std::vector<Index> y;
    for (Index i = 0; i < cut.chi.size(); ++i)
        if (cut.chi(i) != 0.0) y.push_back(i);
    const Mat fy = submatrix(r.f, y, y);
    rep.sigma_min_f = sigma_min(fy);

    const double h_tol = tol_scale * std::max(1.0, op_norm(h));
    const double f_tol = tol_scale * std::max(1.0, op_norm(fy));
    rep.h_singular = rep.sigma_min_h <= h_tol;
    rep.f_singular = rep.sigma_min_f <= f_tol;
    rep.consistent = rep.h_singular == rep.f_singular;

    if (rep.h_singular) {
        const Vec v = min_singular_vector(h);
        const Vec chiv = cut.chi.cast<Complex>().asDiagonal() * v;
        rep.kernel_roundtrip_h = (r.q * chiv - v).norm() / v.norm();
    }
    if (rep.f_singular) {
        Vec uy = min_singular_vector(fy);
        Vec u = Vec::Zero(h.rows());
        for (size_t i = 0; i < y.size(); ++i) u(y[i]) = uy(static_cast<Index>(i));
        const Vec qu = r.q * u;
        rep.kernel_roundtrip_f = (cut.chi.cast<Complex>().asDiagonal() * qu - u).norm() / u.norm();
    }
    return rep;
}

}  // namespace srg
