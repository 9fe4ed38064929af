#pragma once

#include <string>

#include "dygraf/types.hpp"

namespace dygraf {

/// Relative cutoff below which singular values count as zero when a rank
/// is needed: sigma_i <= kSingularValueCutoff * sigma_1.
inline constexpr double kSingularValueCutoff = 1e-12;

/// Square matrix that is exactly symmetric with nonnegative entries.
/// Construction validates unless the value is produced by an operation
/// that guarantees the invariants (see trusted()).
class SymNonNegMatrix {
 public:
  explicit SymNonNegMatrix(Matrix m);

  /// Wraps without validation; caller guarantees the invariants hold.
  static SymNonNegMatrix trusted(Matrix m);

  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }
  Index size() const noexcept { return m_.rows(); }

 private:
  struct Trusted {};
  SymNonNegMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

bool is_symmetric(const Matrix& m, double tol = 0.0);
bool is_nonnegative(const Matrix& m) noexcept;
bool is_finite(const Matrix& m) noexcept;

/// Thin SVD of a real matrix: input == u * singular_values.asDiagonal() * v^T.
struct SvdFactors {
  Matrix u;                 // rows x k, orthonormal columns
  Vector singular_values;   // nonincreasing, all >= 0
  Matrix v;                 // cols x k, orthonormal columns
};

SvdFactors svd(const Matrix& m);

/// Number of singular values above kSingularValueCutoff * sigma_1.
Index numerical_rank(const Vector& singular_values);

double frobenius_norm(const Matrix& m) noexcept;

/// Sum of singular values.
double nuclear_norm(const Matrix& m);

/// Graph Laplacian D - S with D = diag(row sums). Rows sum to zero and the
/// result is positive semidefinite for any symmetric nonnegative S.
Matrix laplacian(const SymNonNegMatrix& s);

/// Smooth lower approximation of the nuclear norm,
///   g_eta(S) = max { <S,Z> - eta/2 ||Z||_F^2 : sigma_1(Z) <= 1 }.
/// Evaluated per singular value in closed form: sigma^2/(2 eta) below eta,
/// sigma - eta/2 at or above. Always in [0, nuclear_norm(S)] and within
/// eta * min(rows, cols) / 2 of the nuclear norm.
double smoothed_nuclear(const Matrix& s, double eta);

/// Gradient of smoothed_nuclear: U diag(min(1, sigma_i/eta)) V^T.
/// Spectral norm never exceeds 1.
Matrix smoothed_nuclear_grad(const Matrix& s, double eta);

/// Singular value soft-thresholding U diag((sigma_i - mu)_+) V^T, the
/// minimizer of 1/2 ||S - A||_F^2 + mu ||S||_*. Returns A unchanged when
/// mu == 0.
Matrix shrink(const Matrix& a, double mu);

/// Frobenius projection onto symmetric matrices with nonnegative entries:
/// clamp((M + M^T)/2, 0). Exact because the antisymmetric part is
/// Frobenius-orthogonal to the constraint set and clamping a symmetric
/// matrix entrywise stays symmetric.
SymNonNegMatrix project_sym_nonneg(const Matrix& m);

/// Orthonormal eigenvectors of the k largest-magnitude eigenvalues, as
/// columns. Sign fixed so the first nonzero component of each vector is
/// positive; magnitude ties are ordered by ascending index of the dominant
/// component.
Matrix top_eigenvectors(const SymNonNegMatrix& s, Index k);

/// Eigenvalues matching top_eigenvectors' column order.
struct TopEigen {
  Vector values;
  Matrix vectors;
};
TopEigen top_eigenpairs(const SymNonNegMatrix& s, Index k);

}  // namespace dygraf
