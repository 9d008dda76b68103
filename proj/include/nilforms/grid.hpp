#ifndef NILFORMS_GRID_HPP
#define NILFORMS_GRID_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "nilforms/exterior.hpp"

namespace nilforms {

// Uniform periodic grid on the unit-period flat torus T^n.
struct TorusGrid {
  int n = 0;
  int res = 0;
  double h = 0.0;

  TorusGrid(int n_, int res_);

  std::size_t npoints() const;
  std::size_t stride(int axis) const;  // linear-index stride of one step along axis
  double coord(std::size_t idx, int axis) const;
};

// Coefficient fields of a degree-p form over the grid, one scalar array per
// lexicographic multi-index component.
struct TorusField {
  TorusGrid grid;
  int degree = 0;
  std::vector<std::vector<double>> comps;

  TorusField(const TorusGrid& g, int p);
  int ncomps() const { return static_cast<int>(comps.size()); }
};

// Finite trigonometric polynomial sum_t coef * {cos,sin}(2 pi k . x).
struct TrigTerm {
  double coef = 0.0;
  std::vector<int> k;
  bool is_sin = false;
};

struct TrigPoly {
  std::vector<TrigTerm> terms;

  double eval(const std::vector<double>& x) const;
  TrigPoly derivative(int axis) const;
  int max_mode() const;
  bool empty() const { return terms.empty(); }
};

// Trig-polynomial p-form on T^n, one polynomial per component.
struct TrigForm {
  int n = 0;
  int degree = 0;
  std::vector<TrigPoly> comps;

  TrigForm(int n_, int p);
  TorusField sample(const TorusGrid& g) const;
  // Exterior derivative and (flat, orthonormal-frame) codifferential,
  // computed analytically on the coefficients.
  TrigForm exterior_derivative() const;
  TrigForm codifferential() const;
  // Directional derivative along the constant vector a.
  TrigForm directional_derivative(const Eigen::VectorXd& a) const;
  int max_mode() const;
};

enum class Scheme { Forward, Central };

// Data-parallel kernels. The omp versions and the serial references in
// nilforms::ref produce bit-identical results; reductions use a fixed
// chunked summation order independent of the thread count.
namespace kernels {

void diff_axis(const TorusGrid& g, const std::vector<double>& in, std::vector<double>& out,
               int axis, Scheme s);
// Exact transpose of diff_axis as a linear map.
void diff_axis_transpose(const TorusGrid& g, const std::vector<double>& in,
                         std::vector<double>& out, int axis, Scheme s);
void axpy(double a, const std::vector<double>& x, std::vector<double>& y);
void scale(double a, std::vector<double>& x);
void pointwise_mul(const std::vector<double>& a, const std::vector<double>& b,
                   std::vector<double>& out);
void pointwise_mul_add(const std::vector<double>& a, const std::vector<double>& b,
                       std::vector<double>& out);
double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace kernels

namespace ref {

void diff_axis(const TorusGrid& g, const std::vector<double>& in, std::vector<double>& out,
               int axis, Scheme s);
void diff_axis_transpose(const TorusGrid& g, const std::vector<double>& in,
                         std::vector<double>& out, int axis, Scheme s);
double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ref

// Discrete exterior derivative on coefficient fields of the flat torus,
// p-form -> (p+1)-form, and its exact transpose.
void d_apply(const TorusField& in, TorusField& out, Scheme s);
void d_transpose_apply(const TorusField& in, TorusField& out, Scheme s);

// Codifferential on the flat torus in the orthonormal frame: the metric
// adjoint of d; with Central scheme this is the classical -sum_i e_i -| D_i.
TorusField codifferential(const TorusField& in, Scheme s);

// Pointwise interior product with the coordinate vector e_axis.
TorusField interior_axis(const TorusField& in, int axis);

// Pointwise wedge with a fixed-form field: out = in ^ w (per grid point).
TorusField pointwise_wedge(const TorusField& in, const TorusField& w);

double max_abs(const TorusField& f);

}  // namespace nilforms

#endif
