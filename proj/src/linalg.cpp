#include "srg/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace srg {

double op_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    // sqrt of the largest eigenvalue of a^H a; accurate enough for norm
    // reports and Neumann checks, much cheaper than a full SVD.
    Eigen::SelfAdjointEigenSolver<Mat> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

double sigma_min(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<Mat> svd(a);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

Vec min_singular_vector(const Mat& a) {
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinV);
    return svd.matrixV().col(svd.matrixV().cols() - 1);
}

Mat submatrix(const Mat& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    Mat b(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) b(i, j) = a(rows[i], cols[j]);
    return b;
}

Mat embed(const Mat& b, const std::vector<Index>& rows, Index n) {
    Mat a = Mat::Zero(n, n);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j) a(rows[i], rows[j]) = b(i, j);
    return a;
}

}  // namespace srg
