#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace srbeam::conic {

using Cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

constexpr int svec_dim(int n) { return n * (n + 1) / 2; }

/// Packs the upper triangle of a symmetric matrix column by column with
/// off-diagonals scaled by sqrt 2, so <svec(A), svec(B)> = Tr(AB).
Eigen::VectorXd svec(const Eigen::MatrixXd& S);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);

/// Real coordinates of a Hermitian matrix in an orthonormal basis
/// (n^2 coordinates; <hvec(A), hvec(B)> = Tr(AB) for Hermitian A, B).
constexpr int hvec_dim(int n) { return n * n; }
Eigen::VectorXd hvec(const MatC& X);
MatC hmat(const Eigen::VectorXd& v, int n);

/// [[Re H, -Im H], [Im H, Re H]]; preserves PSD-ness and satisfies
/// Tr(X H) = Tr(embed(X) embed(H)) / 2. Throws when H is not Hermitian
/// within 1e-10 relative.
Eigen::MatrixXd hermitian_to_real_psd(const MatC& H);

/// Largest eigenpair of a Hermitian matrix with a deterministic phase:
/// the first component of the eigenvector above 1e-12 of its norm is made
/// real positive.
std::pair<double, VecC> max_eigpair(const MatC& A);

}  // namespace srbeam::conic
