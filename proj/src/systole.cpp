#include "nilforms/systole.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

namespace nilforms {

double Lattice::covolume() const { return std::sqrt(gram().determinant()); }

void Lattice::validate() const {
  if (B.cols() == 0 || B.rows() < B.cols())
    throw std::invalid_argument("Lattice: generator matrix must have full column rank");
  Eigen::MatrixXd G = gram();
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("Lattice: generators are linearly dependent");
}

namespace {

// Prefer the coefficient vector whose first nonzero entry is positive; break
// exact-length ties lexicographically.
Eigen::VectorXi canonical(const Eigen::VectorXi& x) {
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] != 0) return x[i] > 0 ? x : Eigen::VectorXi(-x);
  }
  return x;
}

bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

struct Enumerator {
  const Eigen::MatrixXd& R;  // upper-triangular Cholesky factor of the Gram matrix
  int r;
  double best2;
  Eigen::VectorXi best;
  Eigen::VectorXi x;

  explicit Enumerator(const Eigen::MatrixXd& R_, double init2)
      : R(R_), r(static_cast<int>(R_.cols())), best2(init2), best(Eigen::VectorXi::Zero(r)),
        x(Eigen::VectorXi::Zero(r)) {}

  void descend(int i, double partial) {
    if (i < 0) {
      if (x.isZero()) return;
      Eigen::VectorXi c = canonical(x);
      if (partial < best2 * (1.0 - 1e-12) ||
          (partial <= best2 * (1.0 + 1e-12) && (best.isZero() || lex_less(c, best)))) {
        if (partial < best2) best2 = partial;
        best = c;
      }
      return;
    }
    double off = 0.0;
    for (int j = i + 1; j < r; ++j) off += R(i, j) * x[j];
    double center = -off / R(i, i);
    double span = std::sqrt(std::max(best2 * (1.0 + 1e-12) - partial, 0.0)) / R(i, i);
    int lo = static_cast<int>(std::ceil(center - span - 1e-12));
    int hi = static_cast<int>(std::floor(center + span + 1e-12));
    for (int v = lo; v <= hi; ++v) {
      x[i] = v;
      double t = R(i, i) * (v - center);
      double p = partial + t * t;
      if (p <= best2 * (1.0 + 1e-12)) descend(i - 1, p);
    }
    x[i] = 0;
  }
};

}  // namespace

ShortestVector shortest_vector(const Lattice& L) {
  L.validate();
  int r = L.rank();
  if (r > 6) throw std::invalid_argument("shortest_vector: exact enumeration limited to rank 6");
  Eigen::MatrixXd G = L.gram();
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  Eigen::MatrixXd R = llt.matrixU();
  double init2 = G.diagonal().minCoeff();
  Enumerator e(R, init2);
  e.descend(r - 1, 0.0);
  ShortestVector sv;
  sv.coeffs = e.best;
  sv.length = std::sqrt(e.best2);
  return sv;
}

Lattice dual_lattice(const Lattice& L) {
  L.validate();
  // B (B^T B)^{-1}: for square B this is the inverse transpose.
  return Lattice{L.B * L.gram().inverse()};
}

double berge_martinet(const Lattice& L) {
  return shortest_vector(L).length * shortest_vector(dual_lattice(L)).length;
}

double berge_martinet_optimum(int rank, unsigned seed, int samples) {
  if (rank < 1) throw std::invalid_argument("berge_martinet_optimum: rank must be positive");
  // Exact values of the Berge-Martinet constant for small rank.
  switch (rank) {
    case 1: return 1.0;
    case 2: return 2.0 / std::sqrt(3.0);
    case 3: return std::sqrt(1.5);
    case 4: return std::sqrt(2.0);
    default: break;
  }
  if (rank > 6) throw std::invalid_argument("berge_martinet_optimum: rank limited to 6");

  static std::map<std::pair<int, unsigned>, double> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(rank, seed);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_basis = [&]() {
    Eigen::MatrixXd B(rank, rank);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) B(i, j) = gauss(rng);
    return B;
  };
  double best = 0.0;
  Eigen::MatrixXd bestB;
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd B = random_basis();
    if (std::abs(B.determinant()) < 1e-6) continue;
    double v = berge_martinet(Lattice{B});
    if (v > best) {
      best = v;
      bestB = B;
    }
  }
  // Coordinate-wise hill climb with shrinking step.
  double step = 0.2;
  while (step > 1e-7) {
    bool improved = false;
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j)
        for (double d : {step, -step}) {
          Eigen::MatrixXd B = bestB;
          B(i, j) += d;
          if (std::abs(B.determinant()) < 1e-8) continue;
          double v = berge_martinet(Lattice{B});
          if (v > best + 1e-14) {
            best = v;
            bestB = B;
            improved = true;
          }
        }
    if (!improved) step *= 0.5;
  }
  cache[key] = best;
  return best;
}

SystolicReport systolic_report(const Lattice& L, double fiber_length) {
  if (fiber_length <= 0.0)
    throw std::invalid_argument("systolic_report: fiber length must be positive");
  SystolicReport rep;
  rep.lambda1 = shortest_vector(L).length;
  rep.lambda1_dual = shortest_vector(dual_lattice(L)).length;
  double covol = L.covolume();
  rep.stsys1 = rep.lambda1;
  rep.volume = fiber_length * covol;
  rep.sys_nm1 = fiber_length * covol * rep.lambda1_dual;
  rep.ratio = rep.lambda1 * rep.lambda1_dual;  // fiber length cancels
  rep.optimum = berge_martinet_optimum(L.rank());
  rep.equality = rep.ratio > rep.optimum - 1e-6;
  return rep;
}

}  // namespace nilforms
