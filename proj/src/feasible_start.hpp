#pragma once

#include <cmath>
#include <functional>

#include "crlearn/types.hpp"

namespace crlearn::detail {

// Nelder-Mead can only retreat from +inf profile values once it has one
// finite vertex. When the start itself is infeasible, probe a deterministic
// outward pattern (coordinate steps with doubling radius, then the bounds
// midpoint) for a point the inner solve accepts. Returns the start unchanged
// when it is already feasible; returns a zero-length vector when nothing
// feasible was found.
inline Vector bootstrap_feasible_start(
    const std::function<double(const Vector&)>& profile, const Vector& start,
    const Box& bounds, double initial_step) {
  if (std::isfinite(profile(start))) return start;
  const Index d = start.size();
  for (int doubling = 0; doubling < 24; ++doubling) {
    const double radius = initial_step * std::pow(2.0, doubling);
    for (Index j = 0; j < d; ++j) {
      for (double sign : {1.0, -1.0}) {
        Vector cand = start;
        cand[j] += sign * radius;
        if (!bounds.contains(cand)) continue;
        if (std::isfinite(profile(cand))) return cand;
      }
    }
    Vector diag_up = start.array() + radius;
    Vector diag_dn = start.array() - radius;
    if (bounds.contains(diag_up) && std::isfinite(profile(diag_up)))
      return diag_up;
    if (bounds.contains(diag_dn) && std::isfinite(profile(diag_dn)))
      return diag_dn;
  }
  const Vector mid = bounds.midpoint();
  if (mid.allFinite() && bounds.contains(mid) && std::isfinite(profile(mid)))
    return mid;
  return Vector();
}

}  // namespace crlearn::detail
