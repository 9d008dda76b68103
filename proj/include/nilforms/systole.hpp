#ifndef NILFORMS_SYSTOLE_HPP
#define NILFORMS_SYSTOLE_HPP

#include <Eigen/Dense>
#include <vector>

namespace nilforms {

// Full-rank lattice in R^r, columns of B are the generators.
struct Lattice {
  Eigen::MatrixXd B;

  int rank() const { return static_cast<int>(B.cols()); }
  Eigen::MatrixXd gram() const { return B.transpose() * B; }
  double covolume() const;
  void validate() const;
};

struct ShortestVector {
  Eigen::VectorXi coeffs;  // lexicographically-first minimizer with positive leading entry
  double length = 0.0;
};

// Exact shortest nonzero vector by Cholesky-pruned enumeration; rank <= 6.
ShortestVector shortest_vector(const Lattice& L);

Lattice dual_lattice(const Lattice& L);

// lambda_1(L) * lambda_1(L^*); scale invariant.
double berge_martinet(const Lattice& L);

// Supremum of berge_martinet over lattices of the given rank, cached from a
// seeded random search with local refinement. Rank 2 attains 2/sqrt(3) at the
// hexagonal lattice.
double berge_martinet_optimum(int rank, unsigned seed = 2024, int samples = 20000);

struct SystolicReport {
  double lambda1 = 0.0;       // shortest base period
  double lambda1_dual = 0.0;  // shortest dual period
  double stsys1 = 0.0;        // stable 1-systole = lambda1
  double sys_nm1 = 0.0;       // codimension-one systole: ell * covol * lambda1(L^*)
  double volume = 0.0;        // ell * covol(L)
  double ratio = 0.0;         // stsys1 * sys_nm1 / volume = berge_martinet(L)
  double optimum = 0.0;       // rank optimum of the ratio
  bool equality = false;      // ratio attains the optimum (tol 1e-6)
};

// Systolic data of the total space of the circle bundle of fiber length ell
// over R^rank / L. The ratio is independent of ell.
SystolicReport systolic_report(const Lattice& L, double fiber_length);

}  // namespace nilforms

#endif
