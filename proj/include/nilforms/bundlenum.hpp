#ifndef NILFORMS_BUNDLENUM_HPP
#define NILFORMS_BUNDLENUM_HPP

#include <optional>

#include "nilforms/grid.hpp"

namespace nilforms {

// Pseudo left-invariant bundle metric over the unit-period flat torus T^n:
// orthonormal coframe (alpha_1..alpha_n, theta) with
// dtheta = sum_{i<j} c_ij alpha_i ^ alpha_j + dA.
struct BundleMetric {
  Eigen::MatrixXd c;                  // n x n antisymmetric constants
  std::vector<TrigPoly> alpha_field;  // components of the connection perturbation A
  double fiber_length = 1.0;
  Eigen::MatrixXd base_lattice;       // rank-n period lattice, for the systolic report

  int base_dim() const { return static_cast<int>(c.rows()); }
  void validate() const;
};

// S^1-invariant p-form on the bundle: horizontal part plus theta-component,
// both coefficient fields over the base torus.
struct BundleField {
  TorusField horiz;  // degree p
  TorusField vert;   // degree p-1 (empty at p = 0)
  int degree = 0;

  BundleField(const TorusGrid& g, int p)
      : horiz(g, p), vert(g, std::max(p - 1, -1)), degree(p) {}
  std::size_t size() const;
  void to_flat(std::vector<double>& out) const;
  void from_flat(const std::vector<double>& in);
};

// The invariant differential complex of the bundle metric. Lie_Z and the
// eta-multiplication vanish on invariant data (Z is Killing of unit length),
// leaving the flat-torus differential coupled through the curvature 2-form.
class InvariantComplex {
 public:
  InvariantComplex(const BundleMetric& M, const TorusGrid& grid);

  const TorusGrid& grid() const { return grid_; }
  const TorusField& curvature() const { return b_; }
  int base_dim() const { return grid_.n; }

  BundleField apply_d(const BundleField& x) const;
  // Exact transpose of apply_d from degree p+1 down to p.
  BundleField apply_dT(const BundleField& x) const;
  BundleField apply_laplacian(const BundleField& x) const;

  std::size_t field_size(int p) const;

 private:
  TorusGrid grid_;
  TorusField b_;
};

// Dense operator matrix of the degree-1 invariant Laplacian; operator
// dimension (n+1) res^n. Intended for desk-scale grids.
Eigen::MatrixXd assemble_invariant_laplacian(const BundleMetric& M, const TorusGrid& grid);

struct NormStats {
  double min = 0.0, max = 0.0, mean = 0.0;
  double variation = 0.0;  // (max - min) / mean
};

struct HarmonicScanResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<BundleField> fields;
  std::vector<NormStats> norm_stats;  // for near-kernel fields
  int kernel_dim = 0;                 // eigenvalues below kernel_tol
  double kernel_tol = 1e-8;
  int iterations = 0;
  bool dense_path = false;
};

// k lowest eigenpairs of the degree-1 invariant Laplacian. Dense solve when
// the operator dimension is at most 4096, otherwise deterministic seeded
// shift-invert subspace iteration with an FFT-preconditioned CG inner solve.
HarmonicScanResult harmonic_scan(const BundleMetric& M, const TorusGrid& grid, int k,
                                 unsigned seed = 12345);

struct DiscriminatorResult {
  bool is_left_invariant = false;
  double ratio_variation = 0.0;
  double ratio_mean = 0.0;
  std::vector<double> ratio_field;
};

// Applies the invariant Laplacian to alpha_1 ^ alpha_2 and inspects the
// pointwise ratio, which equals |b|^2 pointwise; constancy detects left
// invariance. Requires base dimension 2.
DiscriminatorResult left_invariance_discriminator(const BundleMetric& M, const TorusGrid& grid,
                                                  double tol_ratio = 1e-6);

// Product metric dtheta^2 (+) s on S^1 x T^2 with s = [[1, f], [f, 1]],
// f a function of the S^1 coordinate with sup|f| < 1.
struct CoordMetric3 {
  TrigPoly f;
};

struct BkExampleReport {
  double resid_codiff_dx = 0.0;
  double resid_codiff_dy = 0.0;
  double resid_closed = 0.0;
  double ip_min = 0.0, ip_max = 0.0;
  double ip_formula_error = 0.0;  // vs -f/(1-f^2)
};

BkExampleReport bk_example_check(const CoordMetric3& E, const TorusGrid& grid);

// Discrete check of sum_i e_i -| [grad_i beta + e_i^flat ^ d* beta]
// = (n - 3) d* beta on a flat torus of dimension n - 1, where n is the
// dimension of the total space (coefficient n - 3 = base_dim - 2). The left
// side uses central differences, the right side the analytic codifferential
// of the trigonometric data.
double contraction_identity_check(const TrigForm& beta, const TorusGrid& grid);

// Discrete residual of d*(a ^ beta) = -(grad_{a#} beta + a ^ d* beta) for a
// constant 1-form a.
double awb_coclosed_check(const Eigen::VectorXd& a, const TrigForm& beta, const TorusGrid& grid);

}  // namespace nilforms

#endif
