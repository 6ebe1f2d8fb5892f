#include "macorner/ma_solver/discrete_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macorner/errors.hpp"

namespace macorner {

namespace {

constexpr double kLatticeTol = 1e-9;

double positive(double z) { return z > 0.0 ? z : 0.0; }
double negative(double z) { return z < 0.0 ? z : 0.0; }

/// Fraction of the step d from x that stays inside the closed domain.
double exit_fraction(const Grid2D& g, const Vec2& x, const Vec2& d) {
  double tau = 1.0;
  const double R = g.R();
  for (int c = 0; c < 2; ++c) {
    if (d[c] < 0.0) tau = std::min(tau, x[c] / -d[c]);
    if (d[c] > 0.0) tau = std::min(tau, (R - x[c]) / d[c]);
  }
  if (g.shape() == GridShape::QuarterDisc) {
    const double dd = d.squaredNorm(), xd = x.dot(d), xx = x.squaredNorm();
    const double disc = xd * xd - dd * (xx - R * R);
    const double t = (-xd + std::sqrt(std::max(disc, 0.0))) / dd;
    tau = std::min(tau, t);
  }
  return std::max(tau, 0.0);
}

}  // namespace

DiscreteOperator::DiscreteOperator(std::shared_ptr<const Grid2D> grid, Stencil stencil,
                                   const PointFunction& boundary, double penalty)
    : grid_(std::move(grid)), stencil_(std::move(stencil)), penalty_(penalty) {
  stencil_.validate();
  if (!(penalty_ > 0.0)) throw DomainError("convexity penalty weight must be positive");
  const Grid2D& g = *grid_;
  const double h = g.h();
  const int m = g.n() + 1;
  const int np = static_cast<int>(stencil_.pairs.size());

  node_to_unknown_.assign(g.size(), -1);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.kind(idx) == NodeKind::Interior) {
      node_to_unknown_[idx] = static_cast<int>(interior_.size());
      interior_.push_back(static_cast<std::int32_t>(idx));
    }
  }

  for (const auto& p : stencil_.pairs) {
    offsets_.push_back({static_cast<std::int64_t>(p.e.y) * m + p.e.x,
                        static_cast<std::int64_t>(p.e_perp.y) * m + p.e_perp.x});
    regular_weight_.push_back({1.0 / (h * h * p.e.norm2()), 1.0 / (h * h * p.e_perp.norm2())});
  }

  special_slot_.assign(interior_.size(), -1);
  pair_ok_.assign(interior_.size() * np, 1);

  std::vector<Direction> dirs(2 * np);
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const std::size_t idx = interior_[k];
    const int i = g.i_of(idx), j = g.j_of(idx);
    const Vec2 x = g.point(i, j);
    bool regular = true;
    int usable = 0;
    for (int p = 0; p < np; ++p) {
      bool complete = true;
      for (int d = 0; d < 2; ++d) {
        const IntDir e = d == 0 ? stencil_.pairs[p].e : stencil_.pairs[p].e_perp;
        const double len = h * std::sqrt(static_cast<double>(e.norm2()));
        Arm arms[2];
        double lengths[2];
        for (int sgn = 0; sgn < 2; ++sgn) {
          const int sigma = sgn == 0 ? 1 : -1;
          const int ti = i + sigma * e.x, tj = j + sigma * e.y;
          const Vec2 step(sigma * e.x * h, sigma * e.y * h);
          const double tau = exit_fraction(g, x, step);
          if (tau >= 1.0 - kLatticeTol && g.is_active(ti, tj)) {
            arms[sgn] = {static_cast<std::int32_t>(g.index(ti, tj)), 0.0, 0.0};
            lengths[sgn] = len;
          } else {
            regular = false;
            complete = false;
            Vec2 cut = x + tau * step;
            // land exactly on the straight edges
            for (int c = 0; c < 2; ++c) {
              if (std::abs(cut[c]) < 1e-12 * g.R()) cut[c] = 0.0;
              if (std::abs(cut[c] - g.R()) < 1e-12 * g.R()) cut[c] = g.R();
            }
            if (!(tau > 0.0)) throw StencilSupportError("stencil arm of length zero at an interior node");
            arms[sgn] = {-1, 0.0, boundary ? boundary(cut) : 0.0};
            lengths[sgn] = tau * len;
          }
        }
        const double a = lengths[0], b = lengths[1];
        arms[0].weight = 2.0 / (a * (a + b));
        arms[1].weight = 2.0 / (b * (a + b));
        dirs[2 * p + d] = {arms[0], arms[1]};
      }
      if (!complete && !boundary) {
        pair_ok_[k * np + p] = 0;
      } else {
        ++usable;
      }
    }
    if (usable == 0) {
      throw StencilSupportError("no stencil pair has lattice support at node (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
    }
    if (!regular) {
      special_slot_[k] = static_cast<std::int32_t>(special_.size());
      special_.insert(special_.end(), dirs.begin(), dirs.end());
    }
  }
}

DiscreteOperator::Direction DiscreteOperator::direction(std::size_t k, int p, int d) const {
  const std::int32_t slot = special_slot_[k];
  if (slot >= 0) return special_[slot + 2 * p + d];
  const std::int64_t idx = interior_[k];
  const std::int64_t off = offsets_[p][d];
  const double w = regular_weight_[p][d];
  return {{static_cast<std::int32_t>(idx + off), w, 0.0}, {static_cast<std::int32_t>(idx - off), w, 0.0}};
}

double DiscreteOperator::difference(const Direction& dir, const std::vector<double>& u, double u0) {
  const double vp = dir.plus.node >= 0 ? u[dir.plus.node] : dir.plus.value;
  const double vm = dir.minus.node >= 0 ? u[dir.minus.node] : dir.minus.value;
  return dir.plus.weight * (vp - u0) + dir.minus.weight * (vm - u0);
}

std::array<double, 2> DiscreteOperator::pair_differences(const std::vector<double>& u, std::size_t k, int p) const {
  const double u0 = u[interior_[k]];
  return {difference(direction(k, p, 0), u, u0), difference(direction(k, p, 1), u, u0)};
}

double DiscreteOperator::apply_at(const std::vector<double>& u, std::size_t k, int* active_pair) const {
  const int np = static_cast<int>(stencil_.pairs.size());
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int p = 0; p < np; ++p) {
    if (!pair_ok_[k * np + p]) continue;
    const auto [de, df] = pair_differences(u, k, p);
    const double val = positive(de) * positive(df) + penalty_ * (negative(de) + negative(df));
    if (val < best) {
      best = val;
      arg = p;
    }
  }
  if (active_pair) *active_pair = arg;
  return best;
}

Vector DiscreteOperator::apply(const std::vector<double>& u) const {
  Vector out(static_cast<Eigen::Index>(interior_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) out[static_cast<Eigen::Index>(k)] = apply_at(u, k);
  return out;
}

SparseMatrix DiscreteOperator::negative_jacobian(const std::vector<double>& u) const {
  const std::size_t nu = interior_.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nu * 5);
  for (std::size_t k = 0; k < nu; ++k) {
    int p = 0;
    apply_at(u, k, &p);
    const auto [de, df] = pair_differences(u, k, p);
    const double coef[2] = {de > 0.0 ? positive(df) : penalty_, df > 0.0 ? positive(de) : penalty_};
    double diag = 0.0;
    for (int d = 0; d < 2; ++d) {
      if (coef[d] == 0.0) continue;
      const Direction dir = direction(k, p, d);
      for (const Arm* arm : {&dir.plus, &dir.minus}) {
        diag += coef[d] * arm->weight;
        if (arm->node >= 0) {
          const int col = node_to_unknown_[arm->node];
          if (col >= 0) trip.emplace_back(static_cast<int>(k), col, -coef[d] * arm->weight);
        }
      }
    }
    trip.emplace_back(static_cast<int>(k), static_cast<int>(k), diag);
  }
  SparseMatrix a(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

void DiscreteOperator::gauss_seidel_sweep(std::vector<double>& u, const Vector& f) const {
  const int np = static_cast<int>(stencil_.pairs.size());
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < np; ++p) {
      if (!pair_ok_[k * np + p]) continue;
      double mean[2], wsum[2];
      for (int d = 0; d < 2; ++d) {
        const Direction dir = direction(k, p, d);
        const double vp = dir.plus.node >= 0 ? u[dir.plus.node] : dir.plus.value;
        const double vm = dir.minus.node >= 0 ? u[dir.minus.node] : dir.minus.value;
        wsum[d] = dir.plus.weight + dir.minus.weight;
        mean[d] = (dir.plus.weight * vp + dir.minus.weight * vm) / wsum[d];
      }
      // (mean_e - u0)(mean_f - u0) W_e W_f = f with u0 below both means
      const double half = 0.5 * (mean[0] - mean[1]);
      const double root =
          0.5 * (mean[0] + mean[1]) - std::sqrt(half * half + f[static_cast<Eigen::Index>(k)] / (wsum[0] * wsum[1]));
      best = std::min(best, root);
    }
    u[interior_[k]] = best;
  }
}

double DiscreteOperator::convexity_violation(const std::vector<double>& u) const {
  const int np = static_cast<int>(stencil_.pairs.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    for (int p = 0; p < np; ++p) {
      if (!pair_ok_[k * np + p]) continue;
      const auto d = pair_differences(u, k, p);
      worst = std::min({worst, d[0], d[1]});
    }
  }
  return worst;
}

}  // namespace macorner
