#include "dygraf/matrix_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dygraf/errors.hpp"

namespace dygraf {

namespace {

void require_square(const Matrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(op) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

SymNonNegMatrix::SymNonNegMatrix(Matrix m) : m_(std::move(m)) {
  require_square(m_, "SymNonNegMatrix");
  if (!is_finite(m_)) {
    throw NumericError("SymNonNegMatrix: non-finite entries");
  }
  if (!is_symmetric(m_)) {
    throw DimensionError("SymNonNegMatrix: matrix is not symmetric");
  }
  if (!is_nonnegative(m_)) {
    throw DimensionError("SymNonNegMatrix: matrix has negative entries");
  }
}

SymNonNegMatrix SymNonNegMatrix::trusted(Matrix m) {
  return SymNonNegMatrix(std::move(m), Trusted{});
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    }
  }
  return true;
}

bool is_nonnegative(const Matrix& m) noexcept { return (m.array() >= 0.0).all(); }

bool is_finite(const Matrix& m) noexcept { return m.allFinite(); }

SvdFactors svd(const Matrix& m) {
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Index numerical_rank(const Vector& singular_values) {
  if (singular_values.size() == 0) return 0;
  const double cutoff = kSingularValueCutoff * singular_values(0);
  Index rank = 0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > cutoff && singular_values(i) > 0.0) ++rank;
  }
  return rank;
}

double frobenius_norm(const Matrix& m) noexcept { return m.norm(); }

double nuclear_norm(const Matrix& m) {
  Eigen::BDCSVD<Matrix> dec(m);
  return dec.singularValues().sum();
}

Matrix laplacian(const SymNonNegMatrix& s) {
  const Matrix& m = s.matrix();
  Matrix out = -m;
  out.diagonal() += m.rowwise().sum();
  return out;
}

double smoothed_nuclear(const Matrix& s, double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("smoothed_nuclear: eta must be positive");
  }
  Eigen::BDCSVD<Matrix> dec(s);
  const Vector& sigma = dec.singularValues();
  double value = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) {
    const double sv = sigma(i);
    value += sv < eta ? sv * sv / (2.0 * eta) : sv - eta / 2.0;
  }
  return value;
}

Matrix smoothed_nuclear_grad(const Matrix& s, double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("smoothed_nuclear_grad: eta must be positive");
  }
  SvdFactors f = svd(s);
  Vector clipped = (f.singular_values / eta).cwiseMin(1.0);
  return f.u * clipped.asDiagonal() * f.v.transpose();
}

Matrix shrink(const Matrix& a, double mu) {
  if (mu < 0.0) {
    throw std::invalid_argument("shrink: mu must be nonnegative");
  }
  if (mu == 0.0) return a;
  SvdFactors f = svd(a);
  Vector thresholded = (f.singular_values.array() - mu).max(0.0);
  return f.u * thresholded.asDiagonal() * f.v.transpose();
}

SymNonNegMatrix project_sym_nonneg(const Matrix& m) {
  require_square(m, "project_sym_nonneg");
  Matrix sym = 0.5 * (m + m.transpose());
  return SymNonNegMatrix::trusted(sym.cwiseMax(0.0));
}

TopEigen top_eigenpairs(const SymNonNegMatrix& s, Index k) {
  const Index n = s.size();
  if (k < 1 || k > n) {
    throw std::invalid_argument("top_eigenpairs: k must be in [1, n], got k=" +
                                std::to_string(k) + " with n=" + std::to_string(n));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix());
  if (eig.info() != Eigen::Success) {
    throw NumericError("top_eigenpairs: eigendecomposition failed");
  }
  const Vector& values = eig.eigenvalues();
  const Matrix& vectors = eig.eigenvectors();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const double mag_tol = 1e-12 * std::max(std::abs(values(0)), std::abs(values(n - 1)));
  auto dominant_component = [&](Index col) {
    Index arg = 0;
    vectors.col(col).cwiseAbs().maxCoeff(&arg);
    return arg;
  };
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (std::abs(ma - mb) > mag_tol) return ma > mb;
    return dominant_component(a) < dominant_component(b);
  });

  TopEigen out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (Index j = 0; j < k; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    Vector v = vectors.col(src);
    const double sign_tol = 1e-12 * v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > sign_tol) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.values(j) = values(src);
    out.vectors.col(j) = v;
  }
  return out;
}

Matrix top_eigenvectors(const SymNonNegMatrix& s, Index k) {
  return top_eigenpairs(s, k).vectors;
}

}  // namespace dygraf
