#ifndef NILFORMS_NILALGEBRA_HPP
#define NILFORMS_NILALGEBRA_HPP

#include <string>
#include <vector>

#include "nilforms/exterior.hpp"

namespace nilforms {

// 2-step nilpotent metric Lie algebra: n_h horizontal generators X_i whose
// brackets land in the n_v-dimensional center, [X_i, X_j] = sum_k c_ij^k Z_k.
// The 2-step shape is structural: there is no slot for horizontal bracket
// output, so Jacobi holds identically (still asserted in the constructor).
class MetricLieAlgebra {
 public:
  // c[k] is the antisymmetric n_h x n_h coefficient matrix of Z_{k+1}.
  MetricLieAlgebra(int n_h, int n_v, std::vector<Eigen::MatrixXd> c, InnerProduct G);

  int horizontal_dim() const { return n_h_; }
  int central_dim() const { return n_v_; }
  int dim() const { return n_h_ + n_v_; }
  const InnerProduct& metric() const { return G_; }
  const Eigen::MatrixXd& structure(int k) const { return c_[k]; }
  bool is_abelian() const;

  // Components of [X_i, X_j] in the full basis (X_1..X_nh, Z_1..Z_nv);
  // zero whenever i or j indexes the center.
  Eigen::VectorXd bracket(int i, int j) const;

 private:
  int n_h_;
  int n_v_;
  std::vector<Eigen::MatrixXd> c_;
  InnerProduct G_;
};

// Matrix of the Chevalley-Eilenberg differential Lambda^p -> Lambda^{p+1}
// in lexicographic basis order: d(alpha_i) = 0 on horizontal duals,
// d(zeta_k) = sum_{i<j} c_ij^k alpha_i ^ alpha_j on central duals,
// extended as an antiderivation.
Eigen::MatrixXd ce_differential(const MetricLieAlgebra& A, int p);

// Metric adjoint of ce_differential(A, p-1) with respect to the induced
// inner product on forms: Lambda^p -> Lambda^{p-1}.
Eigen::MatrixXd ce_codifferential(const MetricLieAlgebra& A, int p);

// dd* + d*d on Lambda^p. Self-adjoint for the induced form inner product
// (symmetric as a plain matrix only when the metric is orthonormal).
Eigen::MatrixXd laplacian(const MetricLieAlgebra& A, int p);

struct HarmonicSpace {
  int degree = 0;
  std::vector<ExtForm> basis;  // orthonormal for form_inner
  int betti = 0;
};

// Kernel of the degree-p Laplacian, eigenvalue threshold 1e-10.
HarmonicSpace harmonic_space(const MetricLieAlgebra& A, int p);

int betti_number(const MetricLieAlgebra& A, int p);

enum class AlgebraClass { FLAT_TORUS, B1_CODIM1, OTHER };

std::string to_string(AlgebraClass c);

struct ClassificationRecord {
  AlgebraClass cls = AlgebraClass::OTHER;
  int betti1 = 0;
  // Harmonic 1-forms have constant coefficients in the invariant frame, so
  // constant length; when c != 0 they must in addition lie in the span of
  // the horizontal duals.
  bool constant_length_certificate = false;
  double max_central_component = 0.0;
};

ClassificationRecord classification_gate(const MetricLieAlgebra& A);

struct BracketReport {
  bool ok = false;
  double max_violation = 0.0;
};

// Horizontal duals evaluate to zero on every bracket (Prop.-level shadow of
// the vertical distribution being the bracket target).
BracketReport bracket_orthogonality_check(const MetricLieAlgebra& A);

// Same check against an arbitrary bracket tensor B, where B[i][j] holds the
// components of [e_i, e_j]; used to exercise the negative path.
BracketReport bracket_orthogonality_check(int n_h, int n_v,
                                          const std::vector<std::vector<Eigen::VectorXd>>& B);

}  // namespace nilforms

#endif
