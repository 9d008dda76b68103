#ifndef NILFORMS_EXTERIOR_HPP
#define NILFORMS_EXTERIOR_HPP

#include <Eigen/Dense>
#include <vector>

namespace nilforms {

// Strictly increasing list of basis indices in 1..m.
using MultiIndex = std::vector<int>;

// All degree-p multi-indices over 1..m, in lexicographic order.
// Every coefficient vector in this library follows this order.
const std::vector<MultiIndex>& multi_indices(int m, int p);

long binomial(int n, int k);

// Position of a sorted multi-index in the lexicographic enumeration.
int multi_index_rank(int m, const MultiIndex& idx);

// Sign of the permutation sorting the concatenation of two disjoint sorted
// multi-indices; 0 when they share an index.
int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& out);

// Element of Lambda^p of an m-dimensional dual space, coefficients in
// lexicographic multi-index order.
struct ExtForm {
  int dim = 0;
  int degree = 0;
  Eigen::VectorXd coeffs;

  ExtForm() = default;
  ExtForm(int m, int p);

  static ExtForm zero(int m, int p);
  static ExtForm basis(int m, const MultiIndex& idx);

  bool is_zero(double tol = 0.0) const;
  double norm_inf() const { return coeffs.size() ? coeffs.cwiseAbs().maxCoeff() : 0.0; }

  ExtForm operator+(const ExtForm& o) const;
  ExtForm operator-(const ExtForm& o) const;
  ExtForm operator*(double s) const;
};

// Inner product on the underlying m-dimensional space, given by its Gram
// matrix on vectors. The induced metric on 1-forms is the inverse Gram.
class InnerProduct {
 public:
  explicit InnerProduct(const Eigen::MatrixXd& gram);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& cogram() const { return cogram_; }
  double sqrt_det() const { return sqrt_det_; }

  // Gram matrix of the induced inner product on p-forms (minors of the
  // cogram), in lexicographic basis order.
  Eigen::MatrixXd form_gram(int p) const;

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd cogram_;
  double sqrt_det_ = 1.0;
};

ExtForm wedge(const ExtForm& a, const ExtForm& b);

// Interior product v -| a; v given by components in the working basis.
ExtForm interior(const Eigen::VectorXd& v, const ExtForm& a);

ExtForm hodge_star(const ExtForm& a, const InnerProduct& G, int orientation = +1);

double form_inner(const ExtForm& a, const ExtForm& b, const InnerProduct& G);

}  // namespace nilforms

#endif
