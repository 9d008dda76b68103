#include "nilforms/nilalgebra.hpp"

#include <stdexcept>

namespace nilforms {

MetricLieAlgebra::MetricLieAlgebra(int n_h, int n_v, std::vector<Eigen::MatrixXd> c,
                                   InnerProduct G)
    : n_h_(n_h), n_v_(n_v), c_(std::move(c)), G_(std::move(G)) {
  if (n_h < 0 || n_v < 0) throw std::invalid_argument("MetricLieAlgebra: negative dimension");
  if (static_cast<int>(c_.size()) != n_v)
    throw std::invalid_argument("MetricLieAlgebra: need one structure matrix per central direction");
  if (G_.dim() != dim())
    throw std::invalid_argument("MetricLieAlgebra: metric dimension mismatch");
  for (auto& ck : c_) {
    if (ck.rows() != n_h || ck.cols() != n_h)
      throw std::invalid_argument("MetricLieAlgebra: structure matrix has wrong shape");
    if ((ck + ck.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, ck.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("MetricLieAlgebra: structure matrix not antisymmetric");
  }
  // Jacobi residual by direct expansion. [[X,Y],W] vanishes termwise because
  // brackets land in the center and the center brackets to zero.
  int m = dim();
  double resid = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        Eigen::VectorXd bij = bracket(i, j);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
        for (int l = n_h_; l < m; ++l) {
          // [ [X_i,X_j], X_k ] = sum over central components, all zero brackets.
          sum += bij[l] * bracket(l, k);
        }
        resid = std::max(resid, sum.cwiseAbs().maxCoeff());
      }
  if (resid > 1e-14) throw std::invalid_argument("MetricLieAlgebra: Jacobi identity violated");
}

bool MetricLieAlgebra::is_abelian() const {
  for (const auto& ck : c_)
    if (ck.cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

Eigen::VectorXd MetricLieAlgebra::bracket(int i, int j) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
  if (i < n_h_ && j < n_h_) {
    for (int k = 0; k < n_v_; ++k) out[n_h_ + k] = c_[k](i, j);
  }
  return out;
}

Eigen::MatrixXd ce_differential(const MetricLieAlgebra& A, int p) {
  int m = A.dim();
  if (p < 0 || p > m) throw std::invalid_argument("ce_differential: degree out of range");
  const auto& dom = multi_indices(m, p);
  long rows = binomial(m, p + 1);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, dom.size());
  if (p == m) return D;

  // Differentials of the dual generators.
  std::vector<ExtForm> dgen(m, ExtForm::zero(m, 2));
  for (int k = 0; k < A.central_dim(); ++k) {
    const auto& ck = A.structure(k);
    ExtForm f(m, 2);
    for (int i = 0; i < A.horizontal_dim(); ++i)
      for (int j = i + 1; j < A.horizontal_dim(); ++j) {
        if (ck(i, j) == 0.0) continue;
        MultiIndex ij = {i + 1, j + 1};
        f.coeffs[multi_index_rank(m, ij)] += ck(i, j);
      }
    dgen[A.horizontal_dim() + k] = f;
  }

  for (size_t col = 0; col < dom.size(); ++col) {
    const MultiIndex& I = dom[col];
    ExtForm acc(m, p + 1);
    for (size_t t = 0; t < I.size(); ++t) {
      const ExtForm& dg = dgen[I[t] - 1];
      if (dg.is_zero()) continue;
      MultiIndex rest;
      for (size_t s = 0; s < I.size(); ++s)
        if (s != t) rest.push_back(I[s]);
      double sign = (t % 2 == 0) ? 1.0 : -1.0;  // (-1)^{t} with dg of even degree
      acc = acc + wedge(dg, ExtForm::basis(m, rest)) * sign;
    }
    D.col(col) = acc.coeffs;
  }
  return D;
}

Eigen::MatrixXd ce_codifferential(const MetricLieAlgebra& A, int p) {
  int m = A.dim();
  if (p < 1 || p > m) throw std::invalid_argument("ce_codifferential: degree out of range");
  Eigen::MatrixXd D = ce_differential(A, p - 1);
  Eigen::MatrixXd Mp = A.metric().form_gram(p);
  Eigen::MatrixXd Mq = A.metric().form_gram(p - 1);
  return Mq.ldlt().solve(D.transpose() * Mp);
}

Eigen::MatrixXd laplacian(const MetricLieAlgebra& A, int p) {
  int m = A.dim();
  long n = binomial(m, p);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  if (p > 0) L += ce_differential(A, p - 1) * ce_codifferential(A, p);
  if (p < m) L += ce_codifferential(A, p + 1) * ce_differential(A, p);
  return L;
}

HarmonicSpace harmonic_space(const MetricLieAlgebra& A, int p) {
  Eigen::MatrixXd Mp = A.metric().form_gram(p);
  Eigen::MatrixXd S = Mp * laplacian(A, p);
  S = 0.5 * (S + S.transpose());  // symmetric up to roundoff
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Mp);
  HarmonicSpace h;
  h.degree = p;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] < 1e-10) {
      ExtForm f(A.dim(), p);
      f.coeffs = es.eigenvectors().col(i);
      h.basis.push_back(std::move(f));
    }
  }
  h.betti = static_cast<int>(h.basis.size());
  return h;
}

int betti_number(const MetricLieAlgebra& A, int p) { return harmonic_space(A, p).betti; }

std::string to_string(AlgebraClass c) {
  switch (c) {
    case AlgebraClass::FLAT_TORUS: return "FLAT_TORUS";
    case AlgebraClass::B1_CODIM1: return "B1_CODIM1";
    default: return "OTHER";
  }
}

ClassificationRecord classification_gate(const MetricLieAlgebra& A) {
  ClassificationRecord rec;
  HarmonicSpace h1 = harmonic_space(A, 1);
  rec.betti1 = h1.betti;
  if (A.is_abelian()) {
    rec.cls = AlgebraClass::FLAT_TORUS;
    rec.constant_length_certificate = true;
    return rec;
  }
  rec.cls = (rec.betti1 == A.dim() - 1 && A.central_dim() == 1) ? AlgebraClass::B1_CODIM1
                                                                : AlgebraClass::OTHER;
  // Harmonic 1-forms must stay in the span of the horizontal duals.
  double worst = 0.0;
  for (const auto& f : h1.basis)
    for (int k = A.horizontal_dim(); k < A.dim(); ++k)
      worst = std::max(worst, std::abs(f.coeffs[k]));
  rec.max_central_component = worst;
  rec.constant_length_certificate = worst < 1e-10;
  return rec;
}

BracketReport bracket_orthogonality_check(const MetricLieAlgebra& A) {
  std::vector<std::vector<Eigen::VectorXd>> B(A.dim(), std::vector<Eigen::VectorXd>(A.dim()));
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) B[i][j] = A.bracket(i, j);
  return bracket_orthogonality_check(A.horizontal_dim(), A.central_dim(), B);
}

BracketReport bracket_orthogonality_check(int n_h, int n_v,
                                          const std::vector<std::vector<Eigen::VectorXd>>& B) {
  BracketReport rep;
  int m = n_h + n_v;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      if (static_cast<int>(B.size()) <= j || static_cast<int>(B[j].size()) <= k) continue;
      const Eigen::VectorXd& br = B[j][k];
      // alpha_i evaluated on the bracket, horizontal duals only; brackets
      // involving the center must vanish entirely.
      for (int i = 0; i < n_h; ++i) rep.max_violation = std::max(rep.max_violation, std::abs(br[i]));
      if (j >= n_h || k >= n_h)
        rep.max_violation = std::max(rep.max_violation, br.cwiseAbs().maxCoeff());
    }
  rep.ok = rep.max_violation == 0.0;
  return rep;
}

}  // namespace nilforms
