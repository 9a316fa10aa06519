#include "srbeam/conic/hermitian.hpp"

#include <cmath>
#include <stdexcept>

namespace srbeam::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(S.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      v[k++] = (i == j) ? S(i, j) : kSqrt2 * 0.5 * (S(i, j) + S(j, i));
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  const int n =
      static_cast<int>((std::sqrt(8.0 * static_cast<double>(v.size()) + 1) - 1) / 2 + 0.5);
  if (svec_dim(n) != v.size())
    throw std::invalid_argument("smat: not a triangular length");
  Eigen::MatrixXd S(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double x = v[k++];
      if (i == j) {
        S(i, j) = x;
      } else {
        S(i, j) = S(j, i) = x / kSqrt2;
      }
    }
  return S;
}

Eigen::VectorXd hvec(const MatC& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd v(hvec_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i) v[k++] = X(i, i).real();
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      v[k++] = kSqrt2 * X(i, j).real();
      v[k++] = kSqrt2 * X(i, j).imag();
    }
  return v;
}

MatC hmat(const Eigen::VectorXd& v, int n) {
  if (v.size() != hvec_dim(n))
    throw std::invalid_argument("hmat: length mismatch");
  MatC X = MatC::Zero(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) X(i, i) = v[k++];
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      const double re = v[k++] / kSqrt2;
      const double im = v[k++] / kSqrt2;
      X(i, j) = Cplx(re, im);
      X(j, i) = Cplx(re, -im);
    }
  return X;
}

Eigen::MatrixXd hermitian_to_real_psd(const MatC& H) {
  if (H.rows() != H.cols())
    throw std::invalid_argument("hermitian_to_real_psd: not square");
  const double scale = std::max(1.0, H.norm());
  if ((H - H.adjoint()).norm() > 1e-10 * scale)
    throw std::invalid_argument("hermitian_to_real_psd: input not Hermitian");
  const int n = static_cast<int>(H.rows());
  Eigen::MatrixXd E(2 * n, 2 * n);
  E.topLeftCorner(n, n) = H.real();
  E.bottomRightCorner(n, n) = H.real();
  E.topRightCorner(n, n) = -H.imag();
  E.bottomLeftCorner(n, n) = H.imag();
  return E;
}

std::pair<double, VecC> max_eigpair(const MatC& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("max_eigpair: not square");
  const double scale = std::max(1.0, A.norm());
  if ((A - A.adjoint()).norm() > 1e-9 * scale)
    throw std::invalid_argument("max_eigpair: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatC> es(A);
  const int n = static_cast<int>(A.rows());
  VecC v = es.eigenvectors().col(n - 1);
  // phase convention: first sizable component made real positive
  for (int k = 0; k < n; ++k) {
    if (std::abs(v[k]) > 1e-12 * v.norm()) {
      v *= std::conj(v[k]) / std::abs(v[k]);
      break;
    }
  }
  return {es.eigenvalues()[n - 1], v};
}

}  // namespace srbeam::conic
