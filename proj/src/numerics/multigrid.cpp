#include "macorner/numerics/multigrid.hpp"

#include <algorithm>

#include "macorner/errors.hpp"

namespace macorner {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LatticeMultigrid::Level {
  RowMatrix a;
  Vector inv_diag;
  SparseMatrix p;  // prolongation to this level from the next coarser one
  int n_cells = 0;
  // One node -> unknown map per component; a lattice level carries one or two
  // interleaved components.
  std::vector<std::vector<int>> maps;
};

namespace {

void gauss_seidel(const RowMatrix& a, const Vector& inv_diag, const Vector& b, Vector& x, bool forward) {
  const int n = static_cast<int>(a.rows());
  const int* outer = a.outerIndexPtr();
  const int* inner = a.innerIndexPtr();
  const double* val = a.valuePtr();
  for (int s = 0; s < n; ++s) {
    const int r = forward ? s : n - 1 - s;
    double acc = b[r];
    for (int k = outer[r]; k < outer[r + 1]; ++k) {
      if (inner[k] != r) acc -= val[k] * x[inner[k]];
    }
    x[r] = acc * inv_diag[r];
  }
}

}  // namespace

LatticeMultigrid::LatticeMultigrid(const SparseMatrix& a, int n_cells, const std::vector<int>& node_to_unknown,
                                   MultigridOptions options)
    : options_(options) {
  if (static_cast<std::size_t>(n_cells + 1) * (n_cells + 1) != node_to_unknown.size()) {
    throw InputError("multigrid: node map does not match the lattice");
  }
  auto level = std::make_unique<Level>();
  level->a = a;
  level->n_cells = n_cells;
  level->maps.push_back(node_to_unknown);
  levels_.push_back(std::move(level));

  while (true) {
    Level& fine = *levels_.back();
    const int nf = fine.n_cells;
    const int dim = static_cast<int>(fine.a.rows());
    if (dim <= options_.coarse_size || nf < 8 || static_cast<int>(levels_.size()) >= options_.max_levels) break;

    const bool split = options_.checkerboard && levels_.size() == 1;
    const int nc = nf / 2;
    const std::size_t cnodes = static_cast<std::size_t>(nc + 1) * (nc + 1);
    auto coarse = std::make_unique<Level>();
    coarse->n_cells = nc;
    const std::size_t ncomp = split ? 2 : fine.maps.size();
    // source[k]: fine component feeding coarse component k
    std::vector<std::size_t> source(ncomp);
    for (std::size_t k = 0; k < ncomp; ++k) source[k] = split ? 0 : k;
    int count = 0;
    for (std::size_t k = 0; k < ncomp; ++k) {
      std::vector<int> map(cnodes, -1);
      const auto& fmap = fine.maps[source[k]];
      for (int J = 0; J <= nc; ++J) {
        for (int I = 0; I <= nc; ++I) {
          if (fmap[static_cast<std::size_t>(2 * J) * (nf + 1) + 2 * I] >= 0) {
            map[static_cast<std::size_t>(J) * (nc + 1) + I] = count++;
          }
        }
      }
      coarse->maps.push_back(std::move(map));
    }
    if (count == 0) break;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * 4 * (split ? 2 : 1));
    for (std::size_t k = 0; k < ncomp; ++k) {
      const auto& fmap = fine.maps[source[k]];
      const auto& cmap = coarse->maps[k];
      for (int j = 0; j <= nf; ++j) {
        for (int i = 0; i <= nf; ++i) {
          const int row = fmap[static_cast<std::size_t>(j) * (nf + 1) + i];
          if (row < 0) continue;
          const double mod = (split && k == 1 && (i + j) % 2 == 1) ? -1.0 : 1.0;
          const int is[2] = {i / 2, (i + 1) / 2};
          const int js[2] = {j / 2, (j + 1) / 2};
          const int ni = is[0] == is[1] ? 1 : 2;
          const int nj = js[0] == js[1] ? 1 : 2;
          const double w = mod / (ni * nj);
          for (int b = 0; b < nj; ++b) {
            for (int q = 0; q < ni; ++q) {
              if (is[q] > nc || js[b] > nc) continue;
              const int col = cmap[static_cast<std::size_t>(js[b]) * (nc + 1) + is[q]];
              if (col >= 0) trip.emplace_back(row, col, w);
            }
          }
        }
      }
    }
    SparseMatrix p(dim, count);
    p.setFromTriplets(trip.begin(), trip.end());
    fine.p = p;
    const SparseMatrix af = fine.a;
    SparseMatrix ac = SparseMatrix(p.transpose()) * (af * p);
    ac.prune(0.0);
    coarse->a = ac;
    levels_.push_back(std::move(coarse));
  }

  for (auto& lv : levels_) {
    lv->inv_diag = Vector::Zero(lv->a.rows());
    Vector d = lv->a.diagonal();
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      if (d[k] == 0.0) throw SingularityError("multigrid: zero diagonal entry");
      lv->inv_diag[k] = 1.0 / d[k];
    }
  }
  coarse_.factorize(SparseMatrix(levels_.back()->a));
}

LatticeMultigrid::~LatticeMultigrid() = default;

int LatticeMultigrid::levels() const { return static_cast<int>(levels_.size()); }

int LatticeMultigrid::dimension() const { return static_cast<int>(levels_.front()->a.rows()); }

void LatticeMultigrid::cycle(std::size_t l, const Vector& b, Vector& x) const {
  if (l + 1 == levels_.size()) {
    x = coarse_.solve(b);
    return;
  }
  const Level& lv = *levels_[l];
  for (int k = 0; k < options_.pre_smooth; ++k) gauss_seidel(lv.a, lv.inv_diag, b, x, true);
  const Vector r = b - lv.a * x;
  const Vector rc = lv.p.transpose() * r;
  Vector xc = Vector::Zero(rc.size());
  cycle(l + 1, rc, xc);
  x += lv.p * xc;
  for (int k = 0; k < options_.post_smooth; ++k) gauss_seidel(lv.a, lv.inv_diag, b, x, false);
}

Vector LatticeMultigrid::apply(const Vector& b) const {
  Vector x = Vector::Zero(b.size());
  cycle(0, b, x);
  return x;
}

}  // namespace macorner
