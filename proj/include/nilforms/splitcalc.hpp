#ifndef NILFORMS_SPLITCALC_HPP
#define NILFORMS_SPLITCALC_HPP

#include "nilforms/exterior.hpp"
#include "nilforms/nilalgebra.hpp"

namespace nilforms {

// Vertical/horizontal splitting relative to the distinguished unit direction
// e_m (the central dual for n_v = 1 algebras). A p-form a is represented by
// the pair (horiz, vert) with a = horiz + vert ^ theta, both components
// living on the (m-1)-dimensional horizontal space.
struct SplitForm {
  ExtForm horiz;  // degree p on dimension m-1
  ExtForm vert;   // degree p-1 on dimension m-1
};

// Requires the metric to be adapted to the splitting: the distinguished
// direction has unit length and is orthogonal to the horizontal subspace.
void require_adapted(const InnerProduct& G);

// The metric restricted to the horizontal subspace.
InnerProduct horizontal_metric(const InnerProduct& G);

SplitForm split(const ExtForm& a, const Eigen::VectorXd& Z, const InnerProduct& G);
ExtForm join(const SplitForm& s);

// dtheta = b + eta ^ theta: curvature 2-form b and the 1-form eta dual to
// -nabla_Z Z. For metric Lie algebras with unit central Z, eta vanishes.
struct SplitData {
  ExtForm b;
  ExtForm eta;
};

SplitData curvature_eta(const MetricLieAlgebra& A);

// Wedge multiplication operators on the horizontal exterior algebra and
// their metric adjoints, as matrices in lexicographic basis order.
Eigen::MatrixXd matrix_wedge_by(const ExtForm& w, int q);  // Lambda^q -> Lambda^{q+deg w}

ExtForm op_L(const ExtForm& s, const ExtForm& b);
ExtForm op_S(const ExtForm& s, const ExtForm& eta);
ExtForm op_Lstar(const ExtForm& s, const ExtForm& b, const InnerProduct& Gh);
ExtForm op_Sstar(const ExtForm& s, const ExtForm& eta, const InnerProduct& Gh);

// 2x2 block operator on split pairs. Maps (alpha_p, beta_{p-1}) to degrees
// (p+1, p) for the differential and (p-1, p-2) for the codifferential.
struct BlockOperator {
  Eigen::MatrixXd hh, hv, vh, vv;

  SplitForm apply(const SplitForm& s, int m, int out_deg_h, int out_deg_v) const;
};

// Blocks of d on p-forms: [[d_H, (-1)^{p-1} L], [(-1)^p Lie_Z, d_H + S]].
// Lie_Z is zero on invariant forms.
BlockOperator block_d(const MetricLieAlgebra& A, int p);

// Blocks of d* on p-forms: [[d_H*, (-1)^{p-1} Lie_Z*], [(-1)^p L*, d_H* + S*]].
BlockOperator block_dstar(const MetricLieAlgebra& A, int p);

struct EigenformResult {
  bool is_eigen = false;
  double lambda = 0.0;
  double residual = 0.0;
};

// Rayleigh-quotient eigenform test against the invariant Laplacian.
EigenformResult eigenform_test(const MetricLieAlgebra& A, const ExtForm& a,
                               double tol = 1e-9);

}  // namespace nilforms

#endif
