#include "macorner/harmonic/laplace_sector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "macorner/errors.hpp"
#include "macorner/numerics/linear_solver.hpp"

namespace macorner {

namespace {

constexpr double kOnBoundary = 1e-9;

struct Constraints {
  double sa;
  double ca;
  double rho;
  double outer;

  // Signed distances, positive inside: y, the slanted edge, the two circles.
  double g(int which, const Vec2& x) const {
    switch (which) {
      case 0: return x[1];
      case 1: return sa * x[0] - ca * x[1];
      case 2: return x.norm() - rho;
      default: return outer - x.norm();
    }
  }
};

SectorBoundary part_of(int which) {
  switch (which) {
    case 0: return SectorBoundary::FirstEdge;
    case 1: return SectorBoundary::SecondEdge;
    case 2: return SectorBoundary::InnerArc;
    default: return SectorBoundary::OuterArc;
  }
}

// First s in (0, limit] where p + s d leaves constraint `which`, or +inf.
double exit_distance(const Constraints& c, int which, const Vec2& p, const Vec2& d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (which) {
    case 0: return d[1] < 0.0 ? p[1] / -d[1] : inf;
    case 1: {
      double rate = c.sa * d[0] - c.ca * d[1];
      return rate < 0.0 ? (c.sa * p[0] - c.ca * p[1]) / -rate : inf;
    }
    case 2: {
      double pd = p.dot(d);
      double disc = pd * pd - (p.squaredNorm() - c.rho * c.rho);
      if (disc < 0.0) return inf;
      double s = -pd - std::sqrt(disc);
      return s > 0.0 ? s : inf;
    }
    default: {
      double pd = p.dot(d);
      double disc = pd * pd - (p.squaredNorm() - c.outer * c.outer);
      return -pd + std::sqrt(std::max(disc, 0.0));
    }
  }
}

}  // namespace

SectorField::SectorField(const AngleConstants& k, double rho, double h) : k_(k), rho_(rho), h_(h) {
  if (!(rho > 0.0) || !(rho < 1.0)) throw DomainError("sector annulus needs 0 < rho < 1");
  if (!(h > 0.0)) throw DomainError("sector lattice needs h > 0");
  const double outer = 1.0 / rho;
  double xmin = std::min(0.0, outer * std::cos(k.alpha_minus));
  i0_ = static_cast<int>(std::floor(xmin / h)) - 1;
  int i1 = static_cast<int>(std::ceil(outer / h)) + 1;
  ni_ = i1 - i0_ + 1;
  nj_ = static_cast<int>(std::ceil(outer / h)) + 2;
  kind_.assign(static_cast<std::size_t>(ni_) * nj_, Node::Exterior);
  values_.assign(kind_.size(), 0.0);

  Constraints c{std::sin(k.alpha_minus), std::cos(k.alpha_minus), rho, outer};
  for (int j = 0; j < nj_; ++j) {
    for (int i = 0; i < ni_; ++i) {
      Vec2 x = point(i, j);
      double lo = INFINITY;
      for (int w = 0; w < 4; ++w) lo = std::min(lo, c.g(w, x));
      Node kind = Node::Exterior;
      if (lo > kOnBoundary * h) kind = Node::Interior;
      else if (lo >= -kOnBoundary * h) kind = Node::Boundary;
      kind_[index(i, j)] = kind;
    }
  }
}

bool SectorField::inside(const Vec2& x) const {
  Constraints c{std::sin(k_.alpha_minus), std::cos(k_.alpha_minus), rho_, 1.0 / rho_};
  for (int w = 0; w < 4; ++w)
    if (c.g(w, x) <= 0.0) return false;
  return true;
}

std::optional<double> SectorField::interpolate(const Vec2& x) const {
  double fx = x[0] / h_ - i0_;
  double fy = x[1] / h_;
  int i = static_cast<int>(std::floor(fx));
  int j = static_cast<int>(std::floor(fy));
  if (!in_range(i, j) || !in_range(i + 1, j + 1)) return std::nullopt;
  for (int dj = 0; dj <= 1; ++dj)
    for (int di = 0; di <= 1; ++di)
      if (kind(i + di, j + dj) == Node::Exterior) return std::nullopt;
  double tx = fx - i;
  double ty = fy - j;
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
         tx * ty * at(i + 1, j + 1);
}

void SectorField::write_csv(std::ostream& os) const {
  os << "x1,x2,u\n";
  os.precision(17);
  for (int j = 0; j < nj_; ++j)
    for (int i = 0; i < ni_; ++i) {
      if (kind(i, j) == Node::Exterior) continue;
      Vec2 x = point(i, j);
      os << x[0] << ',' << x[1] << ',' << at(i, j) << '\n';
    }
}

SectorField solve_laplace_sector(const AngleConstants& k, double rho, const SectorData& data, double h) {
  SectorField w(k, rho, h);
  Constraints c{std::sin(k.alpha_minus), std::cos(k.alpha_minus), rho, 1.0 / rho};

  auto nearest_part = [&](const Vec2& x) {
    int best = 0;
    for (int q = 1; q < 4; ++q)
      if (std::abs(c.g(q, x)) < std::abs(c.g(best, x))) best = q;
    return part_of(best);
  };

  std::vector<int> unknown(w.size(), -1);
  int n = 0;
  double data_scale = 1.0;
  for (int j = 0; j < w.rows(); ++j)
    for (int i = 0; i < w.columns(); ++i) {
      if (w.kind(i, j) == SectorField::Node::Interior) unknown[w.index(i, j)] = n++;
      else if (w.kind(i, j) == SectorField::Node::Boundary) {
        Vec2 x = w.point(i, j);
        w.at(i, j) = data(x, nearest_part(x));
        data_scale = std::max(data_scale, std::abs(w.at(i, j)));
      }
    }
  w.unknowns = n;
  if (n == 0) return w;

  struct Arm {
    int col;
    double coef;
    double value;
  };
  std::vector<std::vector<Arm>> rows(n);
  SparseSystem sys(n);
  const Vec2 dirs[4] = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)};
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};

  for (int j = 0; j < w.rows(); ++j)
    for (int i = 0; i < w.columns(); ++i) {
      int row = unknown[w.index(i, j)];
      if (row < 0) continue;
      Vec2 p = w.point(i, j);
      double len[4];
      int nb_col[4];
      double nb_val[4];
      for (int a = 0; a < 4; ++a) {
        double s = std::numeric_limits<double>::infinity();
        int hit = 0;
        for (int q = 0; q < 4; ++q) {
          double e = exit_distance(c, q, p, dirs[a]);
          if (e < s) {
            s = e;
            hit = q;
          }
        }
        int ni = i + di[a], nj = j + dj[a];
        bool use_node = s >= h * (1.0 - kOnBoundary) && w.in_range(ni, nj) &&
                        w.kind(ni, nj) != SectorField::Node::Exterior;
        if (use_node) {
          len[a] = h;
          nb_col[a] = unknown[w.index(ni, nj)];
          nb_val[a] = nb_col[a] < 0 ? w.at(ni, nj) : 0.0;
        } else {
          s = std::min(s, h);
          len[a] = s;
          nb_col[a] = -1;
          Vec2 y = p + s * dirs[a];
          nb_val[a] = data(y, part_of(hit));
          data_scale = std::max(data_scale, std::abs(nb_val[a]));
        }
      }
      double diag = 0.0;
      double rhs = 0.0;
      for (int axis = 0; axis < 2; ++axis) {
        double a = len[2 * axis], b = len[2 * axis + 1];
        double ca = 2.0 / ((a + b) * a), cb = 2.0 / ((a + b) * b);
        double cs[2] = {ca, cb};
        for (int side = 0; side < 2; ++side) {
          int arm = 2 * axis + side;
          diag += cs[side];
          rows[row].push_back({nb_col[arm], cs[side], nb_val[arm]});
          if (nb_col[arm] >= 0) sys.add(row, nb_col[arm], -cs[side]);
          else rhs += cs[side] * nb_val[arm];
        }
      }
      sys.add(row, row, diag);
      sys.rhs[row] = rhs;
    }

  Vector u = solve_linear(sys, 1e-14);

  for (int j = 0; j < w.rows(); ++j)
    for (int i = 0; i < w.columns(); ++i) {
      int row = unknown[w.index(i, j)];
      if (row >= 0) w.at(i, j) = u[row];
    }

  // Residual of the Laplace equations scaled by h^2 / 4 and the data size.
  double res = 0.0;
  for (int j = 0; j < w.rows(); ++j)
    for (int i = 0; i < w.columns(); ++i) {
      int row = unknown[w.index(i, j)];
      if (row < 0) continue;
      double lap = 0.0;
      for (const Arm& a : rows[row]) lap += a.coef * ((a.col >= 0 ? u[a.col] : a.value) - u[row]);
      res = std::max(res, std::abs(lap));
    }
  w.residual = res * h * h / 4.0 / data_scale;
  return w;
}

double max_on_unit_arc(const SectorField& w, int samples) {
  if (samples < 3) throw DomainError("max_on_unit_arc needs at least 3 samples");
  double best = 0.0;
  int used = 0;
  const double a = w.constants().alpha_minus;
  for (int s = 1; s < samples - 1; ++s) {
    double t = a * s / (samples - 1);
    if (auto v = w.interpolate(Vec2(std::cos(t), std::sin(t)))) {
      best = std::max(best, std::abs(*v));
      ++used;
    }
  }
  if (used == 0) throw ExtentError("unit arc does not meet the sector lattice");
  return best;
}

DecayReport sector_decay_check(const AngleConstants& k, double beta, const std::vector<double>& rhos, double h) {
  if (rhos.size() < 2) throw InsufficientDataError("decay check needs at least two radii");
  DecayReport rep;
  rep.beta = beta;
  rep.h = h;
  SectorData data = [beta](const Vec2& x, SectorBoundary part) {
    bool arc = part == SectorBoundary::InnerArc || part == SectorBoundary::OuterArc;
    return arc ? std::pow(x.norm(), beta) : 0.0;
  };
  for (double rho : rhos) {
    SectorField w = solve_laplace_sector(k, rho, data, h);
    DecaySample s;
    s.rho = rho;
    s.raw_max = max_on_unit_arc(w);
    for (int j = 0; j < w.rows(); ++j)
      for (int i = 0; i < w.columns(); ++i) {
        if (w.kind(i, j) != SectorField::Node::Interior) continue;
        double r = w.point(i, j).norm();
        if (r < 2.0 * rho || r > 0.5 / rho) continue;
        s.growth_ratio = std::max(s.growth_ratio, std::abs(w.at(i, j)) / std::pow(r, beta));
      }
    s.normalized_max = s.growth_ratio > 0.0 ? s.raw_max / s.growth_ratio : 0.0;
    s.residual = w.residual;
    s.unknowns = w.unknowns;
    rep.samples.push_back(s);
  }
  rep.raw_decreasing = true;
  rep.normalized_decreasing = true;
  for (std::size_t i = 1; i < rep.samples.size(); ++i) {
    rep.raw_decreasing = rep.raw_decreasing && rep.samples[i].raw_max < rep.samples[i - 1].raw_max;
    rep.normalized_decreasing =
        rep.normalized_decreasing && rep.samples[i].normalized_max < rep.samples[i - 1].normalized_max;
  }
  return rep;
}

nlohmann::json to_json(const DecayReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"rho", s.rho},
                       {"raw_max", s.raw_max},
                       {"growth_ratio", s.growth_ratio},
                       {"normalized_max", s.normalized_max},
                       {"residual", s.residual},
                       {"unknowns", s.unknowns}});
  return {{"beta", r.beta},
          {"h", r.h},
          {"samples", samples},
          {"raw_decreasing", r.raw_decreasing},
          {"normalized_decreasing", r.normalized_decreasing}};
}

}  // namespace macorner
