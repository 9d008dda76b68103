#include "nilforms/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nilforms {

TorusGrid::TorusGrid(int n_, int res_) : n(n_), res(res_), h(1.0 / res_) {
  if (n < 1) throw std::invalid_argument("TorusGrid: dimension must be positive");
  if (res < 8) throw std::invalid_argument("TorusGrid: resolution below 8");
}

std::size_t TorusGrid::npoints() const {
  std::size_t p = 1;
  for (int i = 0; i < n; ++i) p *= static_cast<std::size_t>(res);
  return p;
}

std::size_t TorusGrid::stride(int axis) const {
  std::size_t s = 1;
  for (int i = axis + 1; i < n; ++i) s *= static_cast<std::size_t>(res);
  return s;
}

double TorusGrid::coord(std::size_t idx, int axis) const {
  return static_cast<double>((idx / stride(axis)) % static_cast<std::size_t>(res)) * h;
}

TorusField::TorusField(const TorusGrid& g, int p)
    : grid(g), degree(p), comps(binomial(g.n, p), std::vector<double>(g.npoints(), 0.0)) {}

double TrigPoly::eval(const std::vector<double>& x) const {
  double v = 0.0;
  for (const auto& t : terms) {
    double phase = 0.0;
    for (size_t i = 0; i < t.k.size() && i < x.size(); ++i)
      phase += 2.0 * std::numbers::pi * t.k[i] * x[i];
    v += t.coef * (t.is_sin ? std::sin(phase) : std::cos(phase));
  }
  return v;
}

TrigPoly TrigPoly::derivative(int axis) const {
  TrigPoly d;
  for (const auto& t : terms) {
    if (axis >= static_cast<int>(t.k.size()) || t.k[axis] == 0) continue;
    TrigTerm dt = t;
    double w = 2.0 * std::numbers::pi * t.k[axis];
    if (t.is_sin) {
      dt.is_sin = false;
      dt.coef = t.coef * w;
    } else {
      dt.is_sin = true;
      dt.coef = -t.coef * w;
    }
    d.terms.push_back(std::move(dt));
  }
  return d;
}

int TrigPoly::max_mode() const {
  int m = 0;
  for (const auto& t : terms)
    for (int ki : t.k) m = std::max(m, std::abs(ki));
  return m;
}

TrigForm::TrigForm(int n_, int p) : n(n_), degree(p), comps(binomial(n_, p)) {}

TorusField TrigForm::sample(const TorusGrid& g) const {
  if (g.n != n) throw std::invalid_argument("TrigForm::sample: dimension mismatch");
  TorusField f(g, degree);
  std::size_t N = g.npoints();
  std::vector<double> x(n);
  for (int c = 0; c < f.ncomps(); ++c) {
    if (comps[c].empty()) continue;
    auto& out = f.comps[c];
#pragma omp parallel for firstprivate(x)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(N); ++i) {
      for (int a = 0; a < n; ++a) x[a] = g.coord(i, a);
      out[i] = comps[c].eval(x);
    }
  }
  return f;
}

TrigForm TrigForm::exterior_derivative() const {
  TrigForm out(n, degree + 1);
  const auto& dom = multi_indices(n, degree);
  const auto& range = multi_indices(n, degree + 1);
  for (size_t K = 0; K < range.size(); ++K) {
    for (size_t t = 0; t < range[K].size(); ++t) {
      int axis = range[K][t] - 1;
      MultiIndex J;
      for (size_t s = 0; s < range[K].size(); ++s)
        if (s != t) J.push_back(range[K][s]);
      int j = multi_index_rank(n, J);
      TrigPoly dp = comps[j].derivative(axis);
      double sign = (t % 2 == 0) ? 1.0 : -1.0;
      for (auto& term : dp.terms) {
        term.coef *= sign;
        out.comps[K].terms.push_back(term);
      }
    }
  }
  (void)dom;
  return out;
}

TrigForm TrigForm::codifferential() const {
  // -sum_i e_i -| d/dx_i, orthonormal coordinates.
  TrigForm out(n, degree - 1);
  const auto& dom = multi_indices(n, degree);
  for (size_t K = 0; K < dom.size(); ++K) {
    for (size_t t = 0; t < dom[K].size(); ++t) {
      int axis = dom[K][t] - 1;
      MultiIndex J;
      for (size_t s = 0; s < dom[K].size(); ++s)
        if (s != t) J.push_back(dom[K][s]);
      int j = multi_index_rank(n, J);
      TrigPoly dp = comps[K].derivative(axis);
      double sign = (t % 2 == 0) ? -1.0 : 1.0;  // minus the interior-product sign
      for (auto& term : dp.terms) {
        term.coef *= sign;
        out.comps[j].terms.push_back(term);
      }
    }
  }
  return out;
}

TrigForm TrigForm::directional_derivative(const Eigen::VectorXd& a) const {
  TrigForm out(n, degree);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    for (int axis = 0; axis < n; ++axis) {
      if (a[axis] == 0.0) continue;
      TrigPoly dp = comps[c].derivative(axis);
      for (auto& term : dp.terms) {
        term.coef *= a[axis];
        out.comps[c].terms.push_back(term);
      }
    }
  return out;
}

int TrigForm::max_mode() const {
  int m = 0;
  for (const auto& c : comps) m = std::max(m, c.max_mode());
  return m;
}

namespace ref {

void diff_axis(const TorusGrid& g, const std::vector<double>& in, std::vector<double>& out,
               int axis, Scheme s) {
  const std::size_t N = g.npoints();
  const std::size_t str = g.stride(axis);
  const std::size_t R = static_cast<std::size_t>(g.res);
  const std::size_t wrap = (R - 1) * str;
  out.resize(N);
  const double inv_h = 1.0 / g.h;
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t xa = (i / str) % R;
    std::size_t fwd = (xa == R - 1) ? i - wrap : i + str;
    if (s == Scheme::Forward) {
      out[i] = (in[fwd] - in[i]) * inv_h;
    } else {
      std::size_t bwd = (xa == 0) ? i + wrap : i - str;
      out[i] = (in[fwd] - in[bwd]) * (0.5 * inv_h);
    }
  }
}

void diff_axis_transpose(const TorusGrid& g, const std::vector<double>& in,
                         std::vector<double>& out, int axis, Scheme s) {
  const std::size_t N = g.npoints();
  const std::size_t str = g.stride(axis);
  const std::size_t R = static_cast<std::size_t>(g.res);
  const std::size_t wrap = (R - 1) * str;
  out.resize(N);
  const double inv_h = 1.0 / g.h;
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t xa = (i / str) % R;
    std::size_t bwd = (xa == 0) ? i + wrap : i - str;
    if (s == Scheme::Forward) {
      out[i] = (in[bwd] - in[i]) * inv_h;
    } else {
      std::size_t fwd = (xa == R - 1) ? i - wrap : i + str;
      out[i] = (in[bwd] - in[fwd]) * (0.5 * inv_h);
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  // Same fixed chunk layout as the parallel kernel.
  const std::size_t N = a.size();
  const std::size_t nchunks = std::min<std::size_t>(N, 1024);
  std::vector<double> partial(nchunks, 0.0);
  for (std::size_t c = 0; c < nchunks; ++c) {
    std::size_t lo = c * N / nchunks, hi = (c + 1) * N / nchunks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace ref

namespace kernels {

void diff_axis(const TorusGrid& g, const std::vector<double>& in, std::vector<double>& out,
               int axis, Scheme s) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(g.npoints());
  const std::size_t str = g.stride(axis);
  const std::size_t R = static_cast<std::size_t>(g.res);
  const std::size_t wrap = (R - 1) * str;
  out.resize(N);
  const double inv_h = 1.0 / g.h;
  if (s == Scheme::Forward) {
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < N; ++i) {
      std::size_t xa = (i / str) % R;
      std::size_t fwd = (xa == R - 1) ? i - wrap : i + str;
      out[i] = (in[fwd] - in[i]) * inv_h;
    }
  } else {
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < N; ++i) {
      std::size_t xa = (i / str) % R;
      std::size_t fwd = (xa == R - 1) ? i - wrap : i + str;
      std::size_t bwd = (xa == 0) ? i + wrap : i - str;
      out[i] = (in[fwd] - in[bwd]) * (0.5 * inv_h);
    }
  }
}

void diff_axis_transpose(const TorusGrid& g, const std::vector<double>& in,
                         std::vector<double>& out, int axis, Scheme s) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(g.npoints());
  const std::size_t str = g.stride(axis);
  const std::size_t R = static_cast<std::size_t>(g.res);
  const std::size_t wrap = (R - 1) * str;
  out.resize(N);
  const double inv_h = 1.0 / g.h;
  if (s == Scheme::Forward) {
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < N; ++i) {
      std::size_t xa = (i / str) % R;
      std::size_t bwd = (xa == 0) ? i + wrap : i - str;
      out[i] = (in[bwd] - in[i]) * inv_h;
    }
  } else {
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < N; ++i) {
      std::size_t xa = (i / str) % R;
      std::size_t fwd = (xa == R - 1) ? i - wrap : i + str;
      std::size_t bwd = (xa == 0) ? i + wrap : i - str;
      out[i] = (in[bwd] - in[fwd]) * (0.5 * inv_h);
    }
  }
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for
  for (std::ptrdiff_t i = 0; i < N; ++i) y[i] += a * x[i];
}

void scale(double a, std::vector<double>& x) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for
  for (std::ptrdiff_t i = 0; i < N; ++i) x[i] *= a;
}

void pointwise_mul(const std::vector<double>& a, const std::vector<double>& b,
                   std::vector<double>& out) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(a.size());
  out.resize(N);
#pragma omp parallel for
  for (std::ptrdiff_t i = 0; i < N; ++i) out[i] = a[i] * b[i];
}

void pointwise_mul_add(const std::vector<double>& a, const std::vector<double>& b,
                       std::vector<double>& out) {
  const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for
  for (std::ptrdiff_t i = 0; i < N; ++i) out[i] += a[i] * b[i];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t N = a.size();
  const std::size_t nchunks = std::min<std::size_t>(N, 1024);
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    std::size_t lo = c * N / nchunks, hi = (c + 1) * N / nchunks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace kernels

// Term list shared by d and its transpose: (K, J, axis, sign) with
// (d w)_K += sign * D_axis w_J.
struct DTerm {
  int K, J, axis;
  double sign;
};

static std::vector<DTerm> d_terms(int n, int p) {
  std::vector<DTerm> terms;
  const auto& range = multi_indices(n, p + 1);
  for (size_t K = 0; K < range.size(); ++K) {
    for (size_t t = 0; t < range[K].size(); ++t) {
      MultiIndex J;
      for (size_t s = 0; s < range[K].size(); ++s)
        if (s != t) J.push_back(range[K][s]);
      terms.push_back({static_cast<int>(K), multi_index_rank(n, J), range[K][t] - 1,
                       (t % 2 == 0) ? 1.0 : -1.0});
    }
  }
  return terms;
}

void d_apply(const TorusField& in, TorusField& out, Scheme s) {
  const TorusGrid& g = in.grid;
  for (auto& c : out.comps) std::fill(c.begin(), c.end(), 0.0);
  std::vector<double> tmp;
  for (const auto& t : d_terms(g.n, in.degree)) {
    kernels::diff_axis(g, in.comps[t.J], tmp, t.axis, s);
    kernels::axpy(t.sign, tmp, out.comps[t.K]);
  }
}

void d_transpose_apply(const TorusField& in, TorusField& out, Scheme s) {
  const TorusGrid& g = in.grid;
  for (auto& c : out.comps) std::fill(c.begin(), c.end(), 0.0);
  std::vector<double> tmp;
  for (const auto& t : d_terms(g.n, out.degree)) {
    kernels::diff_axis_transpose(g, in.comps[t.K], tmp, t.axis, s);
    kernels::axpy(t.sign, tmp, out.comps[t.J]);
  }
}

TorusField interior_axis(const TorusField& in, int axis) {
  const TorusGrid& g = in.grid;
  TorusField out(g, in.degree - 1);
  const auto& dom = multi_indices(g.n, in.degree);
  for (size_t K = 0; K < dom.size(); ++K) {
    for (size_t t = 0; t < dom[K].size(); ++t) {
      if (dom[K][t] - 1 != axis) continue;
      MultiIndex J;
      for (size_t s = 0; s < dom[K].size(); ++s)
        if (s != t) J.push_back(dom[K][s]);
      kernels::axpy((t % 2 == 0) ? 1.0 : -1.0, in.comps[K],
                    out.comps[multi_index_rank(g.n, J)]);
    }
  }
  return out;
}

TorusField codifferential(const TorusField& in, Scheme s) {
  const TorusGrid& g = in.grid;
  TorusField out(g, in.degree - 1);
  std::vector<double> tmp;
  const auto& dom = multi_indices(g.n, in.degree);
  for (size_t K = 0; K < dom.size(); ++K) {
    for (size_t t = 0; t < dom[K].size(); ++t) {
      int axis = dom[K][t] - 1;
      MultiIndex J;
      for (size_t r = 0; r < dom[K].size(); ++r)
        if (r != t) J.push_back(dom[K][r]);
      kernels::diff_axis(g, in.comps[K], tmp, axis, s);
      kernels::axpy((t % 2 == 0) ? -1.0 : 1.0, tmp, out.comps[multi_index_rank(g.n, J)]);
    }
  }
  return out;
}

TorusField pointwise_wedge(const TorusField& in, const TorusField& w) {
  const TorusGrid& g = in.grid;
  TorusField out(g, in.degree + w.degree);
  const auto& ia = multi_indices(g.n, in.degree);
  const auto& ib = multi_indices(g.n, w.degree);
  MultiIndex merged;
  std::vector<double> tmp(g.npoints());
  for (size_t u = 0; u < ia.size(); ++u)
    for (size_t v = 0; v < ib.size(); ++v) {
      int sgn = merge_sign(ia[u], ib[v], merged);
      if (sgn == 0) continue;
      kernels::pointwise_mul(in.comps[u], w.comps[v], tmp);
      kernels::axpy(sgn, tmp, out.comps[multi_index_rank(g.n, merged)]);
    }
  return out;
}

double max_abs(const TorusField& f) {
  double m = 0.0;
  for (const auto& c : f.comps)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace nilforms
