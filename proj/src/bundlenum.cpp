#include "nilforms/bundlenum.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nilforms {

void BundleMetric::validate() const {
  int n = base_dim();
  if (c.rows() != c.cols()) throw std::invalid_argument("BundleMetric: c must be square");
  if ((c + c.transpose()).cwiseAbs().maxCoeff() >
      1e-14 * std::max(1.0, c.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("BundleMetric: c must be antisymmetric");
  if (fiber_length <= 0.0) throw std::invalid_argument("BundleMetric: fiber length must be positive");
  if (!alpha_field.empty() && static_cast<int>(alpha_field.size()) != n)
    throw std::invalid_argument("BundleMetric: connection perturbation needs one component per axis");
  if (base_lattice.size() &&
      (base_lattice.rows() != n || base_lattice.cols() != n))
    throw std::invalid_argument("BundleMetric: base lattice has wrong shape");
}

std::size_t BundleField::size() const {
  return horiz.comps.size() * horiz.grid.npoints() + vert.comps.size() * vert.grid.npoints();
}

void BundleField::to_flat(std::vector<double>& out) const {
  out.clear();
  out.reserve(size());
  for (const auto& c : horiz.comps) out.insert(out.end(), c.begin(), c.end());
  for (const auto& c : vert.comps) out.insert(out.end(), c.begin(), c.end());
}

void BundleField::from_flat(const std::vector<double>& in) {
  std::size_t pos = 0;
  const std::size_t N = horiz.grid.npoints();
  for (auto& c : horiz.comps) {
    std::copy(in.begin() + pos, in.begin() + pos + N, c.begin());
    pos += N;
  }
  for (auto& c : vert.comps) {
    std::copy(in.begin() + pos, in.begin() + pos + N, c.begin());
    pos += N;
  }
}

// Adjoint of v -> v ^ b as a pointwise map on coefficient fields.
static TorusField pointwise_wedge_transpose(const TorusField& w, const TorusField& b,
                                            int out_degree) {
  const TorusGrid& g = w.grid;
  TorusField out(g, out_degree);
  const auto& ij = multi_indices(g.n, out_degree);
  const auto& ib = multi_indices(g.n, b.degree);
  MultiIndex merged;
  std::vector<double> tmp(g.npoints());
  for (size_t u = 0; u < ij.size(); ++u)
    for (size_t v = 0; v < ib.size(); ++v) {
      int sgn = merge_sign(ij[u], ib[v], merged);
      if (sgn == 0) continue;
      kernels::pointwise_mul(b.comps[v], w.comps[multi_index_rank(g.n, merged)], tmp);
      kernels::axpy(sgn, tmp, out.comps[u]);
    }
  return out;
}

InvariantComplex::InvariantComplex(const BundleMetric& M, const TorusGrid& grid)
    : grid_(grid), b_(grid, 2) {
  M.validate();
  if (M.base_dim() != grid.n)
    throw std::invalid_argument("InvariantComplex: metric and grid dimensions differ");
  // Curvature b = sum_{i<j} c_ij alpha_i ^ alpha_j + dA, with dA taken
  // analytically on the trigonometric data (exact at grid points).
  TrigForm A(grid.n, 1);
  if (!M.alpha_field.empty()) {
    for (int i = 0; i < grid.n; ++i) A.comps[i] = M.alpha_field[i];
    if (2 * A.max_mode() >= grid.res)
      throw std::invalid_argument("InvariantComplex: resolution too small for the connection field (Nyquist)");
  }
  TorusField dA = A.exterior_derivative().sample(grid);
  const auto& basis2 = multi_indices(grid.n, 2);
  for (size_t K = 0; K < basis2.size(); ++K) {
    int i = basis2[K][0] - 1, j = basis2[K][1] - 1;
    double cij = M.c(i, j);
    for (std::size_t pt = 0; pt < grid.npoints(); ++pt) b_.comps[K][pt] = cij + dA.comps[K][pt];
  }
}

std::size_t InvariantComplex::field_size(int p) const {
  return (binomial(grid_.n, p) + binomial(grid_.n, p - 1)) * grid_.npoints();
}

BundleField InvariantComplex::apply_d(const BundleField& x) const {
  int p = x.degree;
  BundleField out(grid_, p + 1);
  d_apply(x.horiz, out.horiz, Scheme::Forward);
  if (x.vert.ncomps() && out.horiz.ncomps()) {
    double sgn = (p % 2 == 1) ? 1.0 : -1.0;  // (-1)^{p-1}
    TorusField vb = pointwise_wedge(x.vert, b_);
    for (int c = 0; c < out.horiz.ncomps(); ++c) kernels::axpy(sgn, vb.comps[c], out.horiz.comps[c]);
  }
  if (x.vert.ncomps() && out.vert.ncomps()) d_apply(x.vert, out.vert, Scheme::Forward);
  return out;
}

BundleField InvariantComplex::apply_dT(const BundleField& x) const {
  int p = x.degree - 1;
  BundleField out(grid_, p);
  d_transpose_apply(x.horiz, out.horiz, Scheme::Forward);
  if (out.vert.ncomps()) {
    d_transpose_apply(x.vert, out.vert, Scheme::Forward);
    double sgn = (p % 2 == 1) ? 1.0 : -1.0;
    TorusField bt = pointwise_wedge_transpose(x.horiz, b_, p - 1);
    for (int c = 0; c < out.vert.ncomps(); ++c) kernels::axpy(sgn, bt.comps[c], out.vert.comps[c]);
  }
  return out;
}

BundleField InvariantComplex::apply_laplacian(const BundleField& x) const {
  BundleField up = apply_dT(apply_d(x));
  BundleField out = up;
  if (x.degree >= 1) {
    BundleField down = apply_d(apply_dT(x));
    for (int c = 0; c < out.horiz.ncomps(); ++c)
      kernels::axpy(1.0, down.horiz.comps[c], out.horiz.comps[c]);
    for (int c = 0; c < out.vert.ncomps(); ++c)
      kernels::axpy(1.0, down.vert.comps[c], out.vert.comps[c]);
  }
  return out;
}

Eigen::MatrixXd assemble_invariant_laplacian(const BundleMetric& M, const TorusGrid& grid) {
  InvariantComplex C(M, grid);
  std::size_t dim = C.field_size(1);
  Eigen::MatrixXd L(dim, dim);
  BundleField x(grid, 1);
  std::vector<double> flat(dim, 0.0), out;
  for (std::size_t j = 0; j < dim; ++j) {
    std::fill(flat.begin(), flat.end(), 0.0);
    flat[j] = 1.0;
    x.from_flat(flat);
    C.apply_laplacian(x).to_flat(out);
    for (std::size_t i = 0; i < dim; ++i) L(i, j) = out[i];
  }
  return L;
}

// ---------------------------------------------------------------------------
// Eigensolver
// ---------------------------------------------------------------------------

namespace {

// Exact inverse of (flat Laplacian + sigma) per component, via FFT. The flat
// part of the degree-1 operator acts componentwise as the scalar
// forward-difference Laplacian, so this is an ideal preconditioner for the
// curvature-coupled operator.
class FlatShiftInverse {
 public:
  FlatShiftInverse(const TorusGrid& g, int ncomp, double sigma)
      : grid_(g), ncomp_(ncomp) {
    const std::size_t N = g.npoints();
    mult_.resize(N);
    for (std::size_t idx = 0; idx < N; ++idx) {
      double lam = 0.0;
      std::size_t rest = idx;
      for (int a = g.n - 1; a >= 0; --a) {
        int k = static_cast<int>(rest % g.res);
        rest /= g.res;
        double s = 2.0 * std::sin(std::numbers::pi * k / g.res) / g.h;
        lam += s * s;
      }
      mult_[idx] = 1.0 / ((lam + sigma) * static_cast<double>(N));
    }
    buf_ = fftw_alloc_complex(N);
    std::vector<int> dims(g.n, g.res);
    fwd_ = fftw_plan_dft(g.n, dims.data(), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(g.n, dims.data(), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~FlatShiftInverse() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  FlatShiftInverse(const FlatShiftInverse&) = delete;
  FlatShiftInverse& operator=(const FlatShiftInverse&) = delete;

  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    const std::size_t N = grid_.npoints();
    out.resize(in.size());
    for (int c = 0; c < ncomp_; ++c) {
      const double* src = in.data() + c * N;
      double* dst = out.data() + c * N;
      for (std::size_t i = 0; i < N; ++i) {
        buf_[i][0] = src[i];
        buf_[i][1] = 0.0;
      }
      fftw_execute(fwd_);
      for (std::size_t i = 0; i < N; ++i) {
        buf_[i][0] *= mult_[i];
        buf_[i][1] *= mult_[i];
      }
      fftw_execute(bwd_);
      for (std::size_t i = 0; i < N; ++i) dst[i] = buf_[i][0];
    }
  }

 private:
  TorusGrid grid_;
  int ncomp_;
  std::vector<double> mult_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

struct ShiftedOp {
  const InvariantComplex& C;
  double sigma;
  mutable BundleField work;

  ShiftedOp(const InvariantComplex& c, double s) : C(c), sigma(s), work(c.grid(), 1) {}

  void apply(const std::vector<double>& in, std::vector<double>& out) const {
    work.from_flat(in);
    C.apply_laplacian(work).to_flat(out);
    kernels::axpy(sigma, in, out);
  }
};

int pcg_solve(const ShiftedOp& A, const FlatShiftInverse& P, const std::vector<double>& rhs,
              std::vector<double>& x, double rel_tol, int max_it) {
  const std::size_t D = rhs.size();
  x.assign(D, 0.0);
  std::vector<double> r = rhs, z, p, Ap(D);
  P.apply(r, z);
  p = z;
  double rz = kernels::dot(r, z);
  double rhs_norm = std::sqrt(kernels::dot(rhs, rhs));
  if (rhs_norm == 0.0) return 0;
  int it = 0;
  for (; it < max_it; ++it) {
    A.apply(p, Ap);
    double alpha = rz / kernels::dot(p, Ap);
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, Ap, r);
    if (std::sqrt(kernels::dot(r, r)) <= rel_tol * rhs_norm) break;
    P.apply(r, z);
    double rz_new = kernels::dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(D); ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

void canonicalize_sign(std::vector<double>& v) {
  for (double x : v) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

}  // namespace

HarmonicScanResult harmonic_scan(const BundleMetric& M, const TorusGrid& grid, int k,
                                 unsigned seed) {
  if (k < 1 || k > 8) throw std::invalid_argument("harmonic_scan: k must be between 1 and 8");
  InvariantComplex C(M, grid);
  const std::size_t dim = C.field_size(1);
  HarmonicScanResult res;

  std::vector<std::vector<double>> vecs;
  std::vector<double> vals;

  if (dim <= 4096) {
    res.dense_path = true;
    Eigen::MatrixXd L = assemble_invariant_laplacian(M, grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
    for (int j = 0; j < k; ++j) {
      vals.push_back(es.eigenvalues()[j]);
      std::vector<double> v(dim);
      Eigen::Map<Eigen::VectorXd>(v.data(), dim) = es.eigenvectors().col(j);
      vecs.push_back(std::move(v));
    }
  } else {
    // Shift-invert block subspace iteration, deterministic seeded start.
    const double sigma = 1e-2;
    const int block = std::min<std::size_t>(k + 2, dim);
    ShiftedOp A(C, sigma);
    FlatShiftInverse P(grid, static_cast<int>(dim / grid.npoints()), sigma);

    std::vector<std::vector<double>> X(block, std::vector<double>(dim));
    std::uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
    auto next_uniform = [&state]() {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      return static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    };
    for (auto& col : X)
      for (double& v : col) v = next_uniform();

    const int max_outer = 300;
    const double tol = 1e-10;
    std::vector<double> tmp(dim), Av(dim);
    std::vector<double> prev_vals(k, std::numeric_limits<double>::infinity());
    int outer = 0;
    for (; outer < max_outer; ++outer) {
      // Y = (A + sigma)^{-1} X, then orthonormalize (modified Gram-Schmidt).
      std::vector<std::vector<double>> Y(block, std::vector<double>(dim));
      for (int j = 0; j < block; ++j) pcg_solve(A, P, X[j], Y[j], 1e-12, 800);
      for (int j = 0; j < block; ++j) {
        for (int i = 0; i < j; ++i) kernels::axpy(-kernels::dot(Y[i], Y[j]), Y[i], Y[j]);
        double nrm = std::sqrt(kernels::dot(Y[j], Y[j]));
        kernels::scale(1.0 / nrm, Y[j]);
      }
      // Rayleigh-Ritz on the unshifted operator.
      Eigen::MatrixXd T(block, block);
      std::vector<std::vector<double>> AY(block, std::vector<double>(dim));
      for (int j = 0; j < block; ++j) {
        A.apply(Y[j], AY[j]);
        kernels::axpy(-sigma, Y[j], AY[j]);
      }
      for (int i = 0; i < block; ++i)
        for (int j = i; j < block; ++j) {
          double v = 0.5 * (kernels::dot(Y[i], AY[j]) + kernels::dot(Y[j], AY[i]));
          T(i, j) = v;
          T(j, i) = v;
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
      std::vector<std::vector<double>> Xn(block, std::vector<double>(dim, 0.0));
      for (int j = 0; j < block; ++j)
        for (int i = 0; i < block; ++i) kernels::axpy(small.eigenvectors()(i, j), Y[i], Xn[j]);
      X = std::move(Xn);

      // A Ritz pair counts as converged when its residual is small, or —
      // inside a degenerate cluster wider than the block, where the residual
      // cannot decay — when its Ritz value has stabilized.
      bool converged = outer >= 3;
      for (int j = 0; j < k && converged; ++j) {
        double lam = small.eigenvalues()[j];
        A.apply(X[j], Av);
        kernels::axpy(-sigma - lam, X[j], Av);
        bool resid_ok = std::sqrt(kernels::dot(Av, Av)) <= tol * (1.0 + std::abs(lam));
        bool value_ok = std::abs(lam - prev_vals[j]) <= 1e-9 * (1.0 + std::abs(lam));
        // Near-kernel pairs feed the norm statistics and are well separated,
        // so insist on the residual for them.
        if (lam < 0.5 ? !resid_ok : !(resid_ok || value_ok)) converged = false;
      }
      for (int j = 0; j < k; ++j) prev_vals[j] = small.eigenvalues()[j];
      if (converged) {
        for (int j = 0; j < k; ++j) {
          vals.push_back(small.eigenvalues()[j]);
          vecs.push_back(X[j]);
        }
        break;
      }
    }
    res.iterations = outer + 1;
    if (vals.empty())
      throw std::runtime_error("harmonic_scan: eigensolver did not converge after " +
                               std::to_string(max_outer) + " subspace iterations");
  }

  for (auto& v : vecs) canonicalize_sign(v);

  for (int j = 0; j < k; ++j) {
    res.eigenvalues.push_back(vals[j]);
    BundleField f(grid, 1);
    f.from_flat(vecs[j]);
    res.fields.push_back(std::move(f));
  }
  res.kernel_dim = 0;
  for (double v : res.eigenvalues)
    if (v < res.kernel_tol) ++res.kernel_dim;

  // Pointwise norm statistics of the near-kernel fields (orthonormal coframe:
  // the norm is the Euclidean norm of the coefficients).
  const std::size_t N = grid.npoints();
  for (int j = 0; j < res.kernel_dim; ++j) {
    const BundleField& f = res.fields[j];
    NormStats st;
    st.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t pt = 0; pt < N; ++pt) {
      double s2 = 0.0;
      for (const auto& c : f.horiz.comps) s2 += c[pt] * c[pt];
      for (const auto& c : f.vert.comps) s2 += c[pt] * c[pt];
      double nrm = std::sqrt(s2);
      st.min = std::min(st.min, nrm);
      st.max = std::max(st.max, nrm);
      sum += nrm;
    }
    st.mean = sum / static_cast<double>(N);
    st.variation = (st.max - st.min) / st.mean;
    res.norm_stats.push_back(st);
  }
  return res;
}

DiscriminatorResult left_invariance_discriminator(const BundleMetric& M, const TorusGrid& grid,
                                                  double tol_ratio) {
  if (M.base_dim() != 2)
    throw std::invalid_argument("left_invariance_discriminator: requires a 2-dimensional base");
  InvariantComplex C(M, grid);
  BundleField omega(grid, 2);  // alpha_1 ^ alpha_2: unit horizontal coefficient
  std::fill(omega.horiz.comps[0].begin(), omega.horiz.comps[0].end(), 1.0);
  BundleField lap = C.apply_laplacian(omega);
  DiscriminatorResult r;
  r.ratio_field = lap.horiz.comps[0];  // omega has unit coefficient
  double lo = r.ratio_field[0], hi = r.ratio_field[0], sum = 0.0;
  for (double v : r.ratio_field) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  r.ratio_variation = hi - lo;
  r.ratio_mean = sum / static_cast<double>(r.ratio_field.size());
  r.is_left_invariant = r.ratio_variation < tol_ratio;
  return r;
}

BkExampleReport bk_example_check(const CoordMetric3& E, const TorusGrid& grid) {
  if (grid.n != 3) throw std::invalid_argument("bk_example_check: needs a 3-dimensional grid");
  const std::size_t N = grid.npoints();
  std::vector<double> f(N);
  for (std::size_t i = 0; i < N; ++i) f[i] = E.f.eval({grid.coord(i, 0)});
  for (double v : f)
    if (std::abs(v) >= 1.0)
      throw std::invalid_argument("bk_example_check: metric not positive definite (|f| >= 1)");

  BkExampleReport rep;

  // d* alpha = -(1/sqrt(det G)) d_i ( sqrt(det G) G^{ij} alpha_j ), central
  // differences. Coordinates (theta, x, y); G = dtheta^2 (+) [[1,f],[f,1]].
  auto codiff_residual = [&](int which) {
    // which = 1 for dx, 2 for dy.
    std::vector<std::vector<double>> V(3, std::vector<double>(N));
    for (std::size_t i = 0; i < N; ++i) {
      double det = 1.0 - f[i] * f[i];
      double sq = std::sqrt(det);
      V[0][i] = 0.0;
      if (which == 1) {
        V[1][i] = sq / det;          // sqrt(det) G^{xx}
        V[2][i] = -f[i] * sq / det;  // sqrt(det) G^{yx}
      } else {
        V[1][i] = -f[i] * sq / det;
        V[2][i] = sq / det;
      }
    }
    std::vector<double> div(N, 0.0), tmp;
    for (int a = 0; a < 3; ++a) {
      kernels::diff_axis(grid, V[a], tmp, a, Scheme::Central);
      kernels::axpy(1.0, tmp, div);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      worst = std::max(worst, std::abs(div[i] / std::sqrt(1.0 - f[i] * f[i])));
    return worst;
  };
  rep.resid_codiff_dx = codiff_residual(1);
  rep.resid_codiff_dy = codiff_residual(2);

  // Closedness of the coordinate differentials (constant coefficients).
  {
    TorusField dx(grid, 1);
    std::fill(dx.comps[1].begin(), dx.comps[1].end(), 1.0);
    TorusField ddx(grid, 2);
    d_apply(dx, ddx, Scheme::Central);
    rep.resid_closed = max_abs(ddx);
  }

  // Pointwise scalar product <dx, dy> via numerical inversion of the sampled
  // Gram matrix, compared against -f/(1-f^2).
  rep.ip_min = std::numeric_limits<double>::infinity();
  rep.ip_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    Eigen::Matrix3d G;
    G << 1, 0, 0, 0, 1, f[i], 0, f[i], 1;
    double ip = G.inverse()(1, 2);
    rep.ip_min = std::min(rep.ip_min, ip);
    rep.ip_max = std::max(rep.ip_max, ip);
    double formula = -f[i] / (1.0 - f[i] * f[i]);
    rep.ip_formula_error = std::max(rep.ip_formula_error, std::abs(ip - formula));
  }
  return rep;
}

double contraction_identity_check(const TrigForm& beta, const TorusGrid& grid) {
  if (beta.n != grid.n || beta.degree != 2)
    throw std::invalid_argument("contraction_identity_check: beta must be a 2-form on the grid");
  if (2 * beta.max_mode() >= grid.res)
    throw std::invalid_argument("contraction_identity_check: beta not band-limited for this grid");
  TorusField B = beta.sample(grid);
  TorusField dstar = codifferential(B, Scheme::Central);

  // LHS = sum_i e_i -| [ D_i B + e_i^flat ^ d*B ], all discrete.
  TorusField lhs(grid, 1);
  std::vector<double> tmp;
  for (int a = 0; a < grid.n; ++a) {
    TorusField DaB(grid, 2);
    for (int c = 0; c < B.ncomps(); ++c) kernels::diff_axis(grid, B.comps[c], DaB.comps[c], a, Scheme::Central);
    TorusField ea(grid, 1);
    std::fill(ea.comps[a].begin(), ea.comps[a].end(), 1.0);
    TorusField wedge_part = pointwise_wedge(ea, dstar);
    for (int c = 0; c < DaB.ncomps(); ++c) kernels::axpy(1.0, wedge_part.comps[c], DaB.comps[c]);
    TorusField contracted = interior_axis(DaB, a);
    for (int c = 0; c < lhs.ncomps(); ++c) kernels::axpy(1.0, contracted.comps[c], lhs.comps[c]);
  }

  // RHS = (n - 3) d* beta with n the total-space dimension (base + 1); the
  // codifferential is evaluated analytically on the trigonometric data.
  double coeff = static_cast<double>(grid.n - 2);
  TorusField rhs = beta.codifferential().sample(grid);
  double worst = 0.0;
  for (int c = 0; c < lhs.ncomps(); ++c)
    for (std::size_t i = 0; i < grid.npoints(); ++i)
      worst = std::max(worst, std::abs(lhs.comps[c][i] - coeff * rhs.comps[c][i]));
  return worst;
}

double awb_coclosed_check(const Eigen::VectorXd& a, const TrigForm& beta, const TorusGrid& grid) {
  if (a.size() != grid.n || beta.n != grid.n)
    throw std::invalid_argument("awb_coclosed_check: dimension mismatch");
  TorusField B = beta.sample(grid);
  TorusField af(grid, 1);
  for (int i = 0; i < grid.n; ++i) std::fill(af.comps[i].begin(), af.comps[i].end(), a[i]);

  TorusField lhs = codifferential(pointwise_wedge(af, B), Scheme::Central);

  // RHS = -(grad_{a#} beta + a ^ d* beta), analytic derivatives.
  TrigForm grad = beta.directional_derivative(a);
  TrigForm dstar = beta.codifferential();
  TorusField grad_s = grad.sample(grid);
  TorusField wedge_s = pointwise_wedge(af, dstar.sample(grid));
  double worst = 0.0;
  for (int c = 0; c < lhs.ncomps(); ++c)
    for (std::size_t i = 0; i < grid.npoints(); ++i)
      worst = std::max(worst,
                       std::abs(lhs.comps[c][i] + grad_s.comps[c][i] + wedge_s.comps[c][i]));
  return worst;
}

}  // namespace nilforms
