#include "macorner/numerics/linear_solver.hpp"

#include <cmath>
#include <string>

#ifdef MACORNER_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

#include "macorner/errors.hpp"

namespace macorner {

namespace {

#ifdef MACORNER_HAVE_UMFPACK
using DirectLu = Eigen::UmfPackLU<SparseMatrix>;
#else
using DirectLu = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif

void check_structure(const SparseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw SingularityError("matrix is not square");
  }
  std::vector<char> row_hit(a.rows(), 0), col_hit(a.cols(), 0);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.value() != 0.0) {
        row_hit[it.row()] = 1;
        col_hit[it.col()] = 1;
      }
    }
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (!row_hit[i] || !col_hit[i]) {
      throw SingularityError("structurally singular matrix (empty row or column " + std::to_string(i) + ")");
    }
  }
}

}  // namespace

SparseMatrix SparseSystem::matrix() const {
  SparseMatrix a(n, n);
  for (const auto& e : entries) {
    if (e.row() < 0 || e.row() >= n || e.col() < 0 || e.col() >= n) {
      throw InputError("sparse entry index out of range");
    }
  }
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

struct SparseLu::Impl {
  // UMFPACK keeps pointers into the factored matrix, so hold our own copy.
  SparseMatrix a;
  DirectLu lu;
  int n = 0;
  bool ready = false;
};

SparseLu::SparseLu() : impl_(std::make_unique<Impl>()) {}
SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

void SparseLu::factorize(const SparseMatrix& a) {
  check_structure(a);
  impl_->ready = false;
  impl_->a = a;
  impl_->a.makeCompressed();
  impl_->lu.compute(impl_->a);
  if (impl_->lu.info() != Eigen::Success) {
    throw SingularityError("LU factorization failed (numerically singular matrix)");
  }
  impl_->n = static_cast<int>(a.rows());
  impl_->ready = true;
}

bool SparseLu::ready() const { return impl_->ready; }

int SparseLu::dimension() const { return impl_->n; }

Vector SparseLu::solve(const Vector& b) const {
  if (!impl_->ready) throw SolverError("LU solve before factorization", 0.0);
  Vector x = impl_->lu.solve(b);
  return x;
}

Vector solve_linear(const SparseMatrix& a, const Vector& b, double tol) {
  if (!(tol > 0.0)) throw DomainError("solve_linear needs tol > 0");
  if (a.rows() != b.size()) throw InputError("right-hand side has the wrong size");
  SparseLu lu;
  lu.factorize(a);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());

  Vector x = lu.solve(b);
  double res = (b - a * x).norm();
  for (int k = 0; k < 4 && res > tol * bnorm && std::isfinite(res); ++k) {
    x += lu.solve(b - a * x);
    const double next = (b - a * x).norm();
    if (!(next < res)) {
      res = next;
      break;
    }
    res = next;
  }
  if (!std::isfinite(res)) throw SingularityError("linear solve produced non-finite values");
  if (res > tol * bnorm) {
    throw SolverError("linear solve residual " + std::to_string(res / bnorm) + " above tolerance", res / bnorm);
  }
  return x;
}

Vector solve_linear(const SparseSystem& system, double tol) {
  if (system.rhs.size() != system.n) throw InputError("right-hand side has the wrong size");
  return solve_linear(system.matrix(), system.rhs, tol);
}

KrylovResult bicgstab(const SparseMatrix& a, const Vector& b, const Preconditioner& precond, double tol,
                      int max_iterations, const Vector& x0) {
  KrylovResult out;
  out.x = x0.size() == b.size() ? x0 : Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x.setZero();
    out.converged = true;
    return out;
  }
  Vector r = b - a * out.x;
  const Vector r_hat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Vector v = Vector::Zero(b.size()), p = Vector::Zero(b.size());
  out.relative_residual = r.norm() / bnorm;
  if (out.relative_residual <= tol) {
    out.converged = true;
    return out;
  }
  for (int k = 1; k <= max_iterations; ++k) {
    out.iterations = k;
    const double rho_next = r_hat.dot(r);
    if (rho_next == 0.0) break;
    const double beta = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    p = r + beta * (p - omega * v);
    const Vector p_hat = precond(p);
    v = a * p_hat;
    const double denom = r_hat.dot(v);
    if (denom == 0.0) break;
    alpha = rho / denom;
    const Vector s = r - alpha * v;
    if (s.norm() / bnorm <= tol) {
      out.x += alpha * p_hat;
      out.relative_residual = (b - a * out.x).norm() / bnorm;
      out.converged = out.relative_residual <= tol;
      if (out.converged) return out;
      r = b - a * out.x;
      continue;
    }
    const Vector s_hat = precond(s);
    const Vector t = a * s_hat;
    const double tt = t.squaredNorm();
    if (tt == 0.0) break;
    omega = t.dot(s) / tt;
    out.x += alpha * p_hat + omega * s_hat;
    r = s - omega * t;
    out.relative_residual = r.norm() / bnorm;
    if (!std::isfinite(out.relative_residual)) break;
    if (out.relative_residual <= tol) {
      // recurrence residual drifts; confirm with the true one
      out.relative_residual = (b - a * out.x).norm() / bnorm;
      if (out.relative_residual <= tol) {
        out.converged = true;
        return out;
      }
      r = b - a * out.x;
    }
    if (omega == 0.0) break;
  }
  out.relative_residual = (b - a * out.x).norm() / bnorm;
  out.converged = out.relative_residual <= tol;
  return out;
}

const char* linear_backend_name() {
#ifdef MACORNER_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

}  // namespace macorner
