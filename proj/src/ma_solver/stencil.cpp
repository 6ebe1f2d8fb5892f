#include "macorner/ma_solver/stencil.hpp"

#include <algorithm>
#include <cstdlib>

#include "macorner/errors.hpp"

namespace macorner {

void Stencil::validate() const {
  if (pairs.empty()) throw DomainError("stencil has no direction pairs");
  bool diagonal = false;
  for (const auto& p : pairs) {
    if (p.e.norm2() == 0 || p.e_perp.norm2() == 0) throw DomainError("stencil direction is zero");
    if (p.e.x * p.e_perp.x + p.e.y * p.e_perp.y != 0) throw DomainError("stencil pair is not orthogonal");
    auto same_line = [](IntDir a, IntDir b) { return a.x * b.y - a.y * b.x == 0; };
    if ((same_line(p.e, {1, 1}) && same_line(p.e_perp, {1, -1})) ||
        (same_line(p.e, {1, -1}) && same_line(p.e_perp, {1, 1}))) {
      diagonal = true;
    }
  }
  if (!diagonal) throw DomainError("stencil must contain the diagonal pair ((1,1),(1,-1))");
}

int Stencil::reach() const {
  int r = 0;
  for (const auto& p : pairs) {
    r = std::max({r, std::abs(p.e.x), std::abs(p.e.y), std::abs(p.e_perp.x), std::abs(p.e_perp.y)});
  }
  return r;
}

Stencil default_stencil() {
  return Stencil{{{{1, 0}, {0, 1}}, {{1, 1}, {1, -1}}, {{2, 1}, {-1, 2}}, {{1, 2}, {-2, 1}}}};
}

}  // namespace macorner
