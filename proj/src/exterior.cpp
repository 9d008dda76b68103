#include "nilforms/exterior.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace nilforms {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

const std::vector<MultiIndex>& multi_indices(int m, int p) {
  static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(m, p);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<MultiIndex> out;
  if (p == 0) {
    out.push_back({});
  } else if (p <= m) {
    MultiIndex cur(p);
    for (int i = 0; i < p; ++i) cur[i] = i + 1;
    while (true) {
      out.push_back(cur);
      int t = p - 1;
      while (t >= 0 && cur[t] == m - (p - 1 - t)) --t;
      if (t < 0) break;
      ++cur[t];
      for (int s = t + 1; s < p; ++s) cur[s] = cur[s - 1] + 1;
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

int multi_index_rank(int m, const MultiIndex& idx) {
  // Lexicographic rank via counting combinations that precede idx.
  int p = static_cast<int>(idx.size());
  long rank = 0;
  int prev = 0;
  for (int t = 0; t < p; ++t) {
    for (int v = prev + 1; v < idx[t]; ++v) rank += binomial(m - v, p - 1 - t);
    prev = idx[t];
  }
  return static_cast<int>(rank);
}

int merge_sign(const MultiIndex& a, const MultiIndex& b, MultiIndex& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  int inversions = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      // b[j] jumps over the remaining entries of a.
      inversions += static_cast<int>(a.size() - i);
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return (inversions % 2 == 0) ? 1 : -1;
}

ExtForm::ExtForm(int m, int p) : dim(m), degree(p) {
  if (p < 0 || m < 0) throw std::invalid_argument("ExtForm: negative degree or dimension");
  coeffs = Eigen::VectorXd::Zero(binomial(m, p));
}

ExtForm ExtForm::zero(int m, int p) { return ExtForm(m, p); }

ExtForm ExtForm::basis(int m, const MultiIndex& idx) {
  ExtForm f(m, static_cast<int>(idx.size()));
  f.coeffs[multi_index_rank(m, idx)] = 1.0;
  return f;
}

bool ExtForm::is_zero(double tol) const {
  return coeffs.size() == 0 || coeffs.cwiseAbs().maxCoeff() <= tol;
}

ExtForm ExtForm::operator+(const ExtForm& o) const {
  if (dim != o.dim || degree != o.degree)
    throw std::invalid_argument("ExtForm: shape mismatch in addition");
  ExtForm r = *this;
  r.coeffs += o.coeffs;
  return r;
}

ExtForm ExtForm::operator-(const ExtForm& o) const {
  if (dim != o.dim || degree != o.degree)
    throw std::invalid_argument("ExtForm: shape mismatch in subtraction");
  ExtForm r = *this;
  r.coeffs -= o.coeffs;
  return r;
}

ExtForm ExtForm::operator*(double s) const {
  ExtForm r = *this;
  r.coeffs *= s;
  return r;
}

InnerProduct::InnerProduct(const Eigen::MatrixXd& gram) : gram_(gram) {
  if (gram.rows() != gram.cols()) throw std::invalid_argument("InnerProduct: Gram matrix not square");
  double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("InnerProduct: Gram matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.eigenvalues().minCoeff() <= 1e-12 * scale)
    throw std::invalid_argument("InnerProduct: Gram matrix not positive definite");
  cogram_ = gram.inverse();
  sqrt_det_ = std::sqrt(gram.determinant());
}

Eigen::MatrixXd InnerProduct::form_gram(int p) const {
  int m = dim();
  const auto& basis = multi_indices(m, p);
  int n = static_cast<int>(basis.size());
  Eigen::MatrixXd M(n, n);
  Eigen::MatrixXd sub(p, p);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) sub(r, c) = cogram_(basis[a][r] - 1, basis[b][c] - 1);
      double v = (p == 0) ? 1.0 : sub.determinant();
      M(a, b) = v;
      M(b, a) = v;
    }
  }
  return M;
}

ExtForm wedge(const ExtForm& a, const ExtForm& b) {
  if (a.dim != b.dim) throw std::invalid_argument("wedge: ambient dimension mismatch");
  int m = a.dim;
  int p = a.degree + b.degree;
  ExtForm r(m, p);
  if (p > m) return r;  // empty coefficient vector, the zero form
  const auto& ia = multi_indices(m, a.degree);
  const auto& ib = multi_indices(m, b.degree);
  MultiIndex merged;
  for (int u = 0; u < a.coeffs.size(); ++u) {
    if (a.coeffs[u] == 0.0) continue;
    for (int v = 0; v < b.coeffs.size(); ++v) {
      if (b.coeffs[v] == 0.0) continue;
      int s = merge_sign(ia[u], ib[v], merged);
      if (s == 0) continue;
      r.coeffs[multi_index_rank(m, merged)] += s * a.coeffs[u] * b.coeffs[v];
    }
  }
  return r;
}

ExtForm interior(const Eigen::VectorXd& v, const ExtForm& a) {
  if (v.size() != a.dim) throw std::invalid_argument("interior: vector dimension mismatch");
  if (a.degree == 0) return ExtForm::zero(a.dim, 0);
  ExtForm r(a.dim, a.degree - 1);
  const auto& basis = multi_indices(a.dim, a.degree);
  MultiIndex rest;
  for (int u = 0; u < a.coeffs.size(); ++u) {
    if (a.coeffs[u] == 0.0) continue;
    const MultiIndex& I = basis[u];
    for (size_t t = 0; t < I.size(); ++t) {
      double vk = v[I[t] - 1];
      if (vk == 0.0) continue;
      rest.clear();
      for (size_t s = 0; s < I.size(); ++s)
        if (s != t) rest.push_back(I[s]);
      double sign = (t % 2 == 0) ? 1.0 : -1.0;
      r.coeffs[multi_index_rank(a.dim, rest)] += sign * vk * a.coeffs[u];
    }
  }
  return r;
}

ExtForm hodge_star(const ExtForm& a, const InnerProduct& G, int orientation) {
  if (G.dim() != a.dim) throw std::invalid_argument("hodge_star: dimension mismatch");
  int m = a.dim;
  int p = a.degree;
  // For every basis I of degree p:  e^I ^ (*a) = <e^I, a> vol, which pins the
  // complement coefficient of *a.
  Eigen::MatrixXd Mp = G.form_gram(p);
  Eigen::VectorXd pairing = Mp * a.coeffs;  // <e^I, a> per I
  ExtForm r(m, m - p);
  const auto& basis = multi_indices(m, p);
  MultiIndex comp, merged;
  for (int u = 0; u < pairing.size(); ++u) {
    const MultiIndex& I = basis[u];
    comp.clear();
    size_t t = 0;
    for (int k = 1; k <= m; ++k) {
      if (t < I.size() && I[t] == k) {
        ++t;
      } else {
        comp.push_back(k);
      }
    }
    int s = merge_sign(I, comp, merged);
    r.coeffs[multi_index_rank(m, comp)] = s * orientation * G.sqrt_det() * pairing[u];
  }
  return r;
}

double form_inner(const ExtForm& a, const ExtForm& b, const InnerProduct& G) {
  if (a.dim != b.dim || a.degree != b.degree)
    throw std::invalid_argument("form_inner: degree or dimension mismatch");
  return a.coeffs.dot(G.form_gram(a.degree) * b.coeffs);
}

}  // namespace nilforms
