#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace srg {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

// Spectral (operator 2-) norm.
double op_norm(const Mat& a);

// Smallest singular value.
double sigma_min(const Mat& a);

// Right singular vector belonging to the smallest singular value.
Vec min_singular_vector(const Mat& a);

// Submatrix a(rows, cols) for index lists.
Mat submatrix(const Mat& a, const std::vector<Index>& rows, const std::vector<Index>& cols);

// Scatter b into an n x n zero matrix at positions (rows x rows).
Mat embed(const Mat& b, const std::vector<Index>& rows, Index n);

struct SrgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace srg
