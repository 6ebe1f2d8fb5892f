#include "macorner/asymptotics/hessian.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "macorner/errors.hpp"
#include "macorner/numerics/radial_profile.hpp"

namespace macorner {

HessianField::HessianField(const ScalarField& u) : grid_(u.grid_ptr()) {
  const Grid2D& g = *grid_;
  const int n = g.n();
  const double h = g.h(), h2 = h * h;
  const std::size_t size = g.size();
  u11_.assign(size, 0.0);
  u12_.assign(size, 0.0);
  u22_.assign(size, 0.0);
  valid_.assign(size, 0);
  const double rmax = g.R() - 2.0 * h;
  for (int j = 2; j <= n - 2; ++j) {
    for (int i = 2; i <= n - 2; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) == NodeKind::Exterior) continue;
      if (g.shape() == GridShape::QuarterDisc && g.point(i, j).norm() > rmax * (1.0 + 1e-12)) continue;
      valid_[idx] = 1;
      const double c = u.at(i, j);
      u11_[idx] = (u.at(i + 1, j) - 2.0 * c + u.at(i - 1, j)) / h2;
      u22_[idx] = (u.at(i, j + 1) - 2.0 * c + u.at(i, j - 1)) / h2;
      u12_[idx] = (u.at(i + 1, j + 1) - u.at(i + 1, j - 1) - u.at(i - 1, j + 1) + u.at(i - 1, j - 1)) / (4.0 * h2);
    }
  }
}

Mat2 HessianField::at(std::size_t idx) const {
  Mat2 m;
  m << u11_[idx], u12_[idx], u12_[idx], u22_[idx];
  return m;
}

void HessianField::set(std::size_t idx, double a11, double a12, double a22) {
  u11_[idx] = a11;
  u12_[idx] = a12;
  u22_[idx] = a22;
}

std::optional<Mat2> HessianField::interpolate(const Vec2& x) const {
  const Grid2D& g = *grid_;
  const double h = g.h();
  const double fx = x[0] / h, fy = x[1] / h;
  if (fx < 0.0 || fy < 0.0 || fx > g.n() || fy > g.n()) return std::nullopt;
  const int i0 = std::min(static_cast<int>(std::floor(fx)), g.n() - 1);
  const int j0 = std::min(static_cast<int>(std::floor(fy)), g.n() - 1);
  const double tx = fx - i0, ty = fy - j0;
  Mat2 acc = Mat2::Zero();
  for (int b = 0; b <= 1; ++b) {
    for (int a = 0; a <= 1; ++a) {
      const double w = (a ? tx : 1.0 - tx) * (b ? ty : 1.0 - ty);
      const std::size_t idx = g.index(i0 + a, j0 + b);
      if (!valid_[idx]) {
        if (w == 0.0) continue;
        return std::nullopt;
      }
      acc += w * at(idx);
    }
  }
  return acc;
}

bool HessianField::outer_ok(const Vec2& x) const {
  const Grid2D& g = *grid_;
  const double lim = g.R() - 2.0 * g.h();
  if (g.shape() == GridShape::QuarterDisc) return x.norm() <= lim * (1.0 + 1e-12);
  return x[0] <= lim * (1.0 + 1e-12) && x[1] <= lim * (1.0 + 1e-12);
}

HessianField hessian_field(const ScalarField& u) { return HessianField(u); }

double min_eigenvalue(const Mat2& m) {
  const double tr = 0.5 * (m(0, 0) + m(1, 1));
  const double d = 0.5 * (m(0, 0) - m(1, 1));
  return tr - std::sqrt(d * d + m(0, 1) * m(0, 1));
}

std::vector<Mat2> hessian_on_arc(const HessianField& H, double r) {
  const double h = H.grid().h();
  const int m = arc_sample_count(r, h);
  std::vector<Mat2> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double th = 0.5 * std::numbers::pi * k / (m - 1);
    const Vec2 x(r * std::cos(th), r * std::sin(th));
    if (x[0] < 2.0 * h || x[1] < 2.0 * h) continue;
    const auto v = H.interpolate(x);
    if (!v) {
      if (!H.outer_ok(x)) throw ExtentError("arc of radius " + std::to_string(r) + " leaves the Hessian validity region");
      continue;
    }
    out.push_back(*v);
  }
  if (out.size() < 8) throw ExtentError("arc of radius " + std::to_string(r) + " has too few valid Hessian samples");
  return out;
}

namespace {

nlohmann::json entry_json(const AuditEntry& e) { return {{"value", e.value}, {"x1", e.where[0]}, {"x2", e.where[1]}}; }

std::string where(const AuditEntry& e) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g at (%.6g, %.6g)", e.value, e.where[0], e.where[1]);
  return buf;
}

}  // namespace

HessianAudit hessian_audit(const HessianField& H, const AngleConstants& k, double tol) {
  HessianAudit a;
  a.tol = tol;
  const double inf = std::numeric_limits<double>::infinity();
  a.max_u11.value = a.max_u22.value = a.max_abs_u12.value = a.max_det.value = -inf;
  a.min_eigen.value = a.min_det.value = inf;
  const Grid2D& g = H.grid();
  bool any = false;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (!H.valid(idx)) continue;
    any = true;
    const Vec2 x = g.point(idx);
    auto upd_max = [&](AuditEntry& e, double v) {
      if (v > e.value) e = {v, x};
    };
    auto upd_min = [&](AuditEntry& e, double v) {
      if (v < e.value) e = {v, x};
    };
    const Mat2 m = H.at(idx);
    upd_max(a.max_u11, m(0, 0));
    upd_max(a.max_u22, m(1, 1));
    upd_max(a.max_abs_u12, std::abs(m(0, 1)));
    upd_min(a.min_eigen, min_eigenvalue(m));
    const double det = m.determinant();
    upd_min(a.min_det, det);
    upd_max(a.max_det, det);
  }
  if (!any) throw ExtentError("Hessian field has no valid nodes");
  if (a.max_u11.value > 1.0 + tol) a.violations.push_back("u11 = " + where(a.max_u11));
  if (a.max_u22.value > 1.0 + tol) a.violations.push_back("u22 = " + where(a.max_u22));
  if (a.max_abs_u12.value > k.s + tol) a.violations.push_back("|u12| = " + where(a.max_abs_u12));
  a.pass = a.violations.empty();
  return a;
}

nlohmann::json to_json(const HessianAudit& a) {
  return {{"max_u11", entry_json(a.max_u11)}, {"max_u22", entry_json(a.max_u22)},
          {"max_abs_u12", entry_json(a.max_abs_u12)}, {"min_eigenvalue", entry_json(a.min_eigen)},
          {"min_det", entry_json(a.min_det)},   {"max_det", entry_json(a.max_det)},
          {"tol", a.tol},                       {"pass", a.pass},
          {"violations", a.violations}};
}

}  // namespace macorner
