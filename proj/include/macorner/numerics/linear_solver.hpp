#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

namespace macorner {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Square system A x = b assembled from (row, col, value) triples;
/// duplicates are summed when the matrix is built.
struct SparseSystem {
  int n = 0;
  std::vector<Eigen::Triplet<double>> entries;
  Vector rhs;

  explicit SparseSystem(int dim = 0) : n(dim), rhs(Vector::Zero(dim)) {}
  void add(int row, int col, double value) { entries.emplace_back(row, col, value); }
  SparseMatrix matrix() const;
};

/// Returns x with ||A x - b||_2 <= tol ||b||_2. Direct LU with iterative
/// refinement. Throws SingularityError for structurally or numerically
/// singular matrices and SolverError when refinement stalls above tol.
Vector solve_linear(const SparseSystem& system, double tol);
Vector solve_linear(const SparseMatrix& a, const Vector& b, double tol);

/// Sparse LU factorization that can be kept and reused, either for exact
/// solves or as a preconditioner for nearby matrices.
class SparseLu {
public:
  SparseLu();
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  /// Throws SingularityError.
  void factorize(const SparseMatrix& a);
  bool ready() const;
  Vector solve(const Vector& b) const;
  int dimension() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct KrylovResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

using Preconditioner = std::function<Vector(const Vector&)>;

/// Right-preconditioned BiCGSTAB.
KrylovResult bicgstab(const SparseMatrix& a, const Vector& b, const Preconditioner& precond, double tol,
                      int max_iterations, const Vector& x0);

/// Name of the direct backend compiled in ("umfpack" or "eigen-sparselu").
const char* linear_backend_name();

}  // namespace macorner
