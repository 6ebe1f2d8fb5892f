#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace macorner {

enum class BracketMethod { Bisection, Itp };

struct BisectOptions {
  BracketMethod method = BracketMethod::Itp;
  /// Values already known at the bracket ends; avoids re-evaluating fn there.
  std::optional<double> f_lo;
  std::optional<double> f_hi;
};

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  /// fn at root when stopped by tol_f, else fn at the last evaluation.
  double f_root = 0.0;
  /// Every (t, fn(t)) evaluated, bracket ends included.
  std::vector<std::pair<double, double>> history;
};

/// Bracketed root of fn on [lo, hi]. Stops when |fn(t)| <= tol_f or the
/// bracket is narrower than tol_x. The default ITP variant interpolates but
/// never needs more than ceil(log2((hi - lo) / tol_x)) + 1 iterations; the
/// Bisection variant halves every time. Throws BracketError when fn(lo) and
/// fn(hi) share a strict sign.
RootResult bisect(const std::function<double(double)>& fn, double lo, double hi, double tol_x, double tol_f,
                  const BisectOptions& options = {});

}  // namespace macorner
