#include "crlearn/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace crlearn {

void NelderMeadConfig::validate() const {
  if (!(reflect > 0.0) || !(expand > reflect) || !(contract > 0.0) ||
      !(contract < 1.0) || !(shrink > 0.0) || !(shrink < 1.0))
    throw Error(ErrorCode::InvalidConfig,
                "nelder-mead coefficients out of range");
  if (max_iters < 1 || !(f_tol > 0.0) || !(initial_step > 0.0))
    throw Error(ErrorCode::InvalidConfig, "nelder-mead iteration limits invalid");
}

namespace {

struct Vertex {
  Vector x;
  double f;
  long order;  // insertion counter, breaks value ties deterministically
};

bool vertex_less(const Vertex& a, const Vertex& b) {
  if (a.f != b.f) return a.f < b.f;
  return a.order < b.order;
}

double simplex_volume(const std::vector<Vertex>& v) {
  const Index d = v[0].x.size();
  Matrix edges(d, d);
  for (Index j = 0; j < d; ++j) edges.col(j) = v[j + 1].x - v[0].x;
  double factorial = 1.0;
  for (Index k = 2; k <= d; ++k) factorial *= static_cast<double>(k);
  return std::abs(edges.determinant()) / factorial;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Vector&)>& objective, const Vector& x0,
    const NelderMeadConfig& cfg) {
  cfg.validate();
  const Index d = x0.size();
  if (d < 1) throw Error(ErrorCode::InvalidConfig, "empty start point");

  long counter = 0;
  double step = cfg.initial_step;
  NelderMeadResult result;

  auto build_simplex = [&](const Vector& center, double h) {
    std::vector<Vertex> simplex;
    simplex.reserve(d + 1);
    simplex.push_back({center, objective(center), counter++});
    for (Index j = 0; j < d; ++j) {
      Vector x = center;
      x[j] += h;
      simplex.push_back({x, objective(x), counter++});
    }
    std::sort(simplex.begin(), simplex.end(), vertex_less);
    return simplex;
  };

  std::vector<Vertex> simplex = build_simplex(x0, step);

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    const double f_best = simplex.front().f;
    const double f_worst = simplex.back().f;
    if (std::isfinite(f_best) && std::isfinite(f_worst) &&
        f_worst - f_best <= cfg.f_tol) {
      result.converged = true;
      break;
    }

    if (std::isfinite(f_best) && simplex_volume(simplex) < 1e-14) {
      if (result.restarts >= 2) break;
      ++result.restarts;
      step *= 0.5;
      Vector incumbent = simplex.front().x;
      simplex = build_simplex(incumbent, step);
      continue;
    }

    // Centroid of all but the worst vertex.
    Vector centroid = Vector::Zero(d);
    for (Index j = 0; j < d; ++j) centroid += simplex[j].x;
    centroid /= static_cast<double>(d);
    const Vertex& worst = simplex.back();

    Vector xr = centroid + cfg.reflect * (centroid - worst.x);
    double fr = objective(xr);

    Vertex replacement{xr, fr, counter++};
    if (fr < simplex.front().f) {
      Vector xe = centroid + cfg.expand * (xr - centroid);
      double fe = objective(xe);
      if (fe < fr) replacement = {xe, fe, counter++};
    } else if (fr >= simplex[d - 1].f) {
      const bool outside = fr < worst.f;
      Vector xc = outside ? centroid + cfg.contract * (xr - centroid)
                          : centroid + cfg.contract * (worst.x - centroid);
      double fc = objective(xc);
      if (fc < (outside ? fr : worst.f)) {
        replacement = {xc, fc, counter++};
      } else {
        // Shrink everything toward the best vertex.
        for (std::size_t j = 1; j < simplex.size(); ++j) {
          simplex[j].x =
              simplex[0].x + cfg.shrink * (simplex[j].x - simplex[0].x);
          simplex[j].f = objective(simplex[j].x);
          simplex[j].order = counter++;
        }
        std::sort(simplex.begin(), simplex.end(), vertex_less);
        continue;
      }
    }
    simplex.back() = replacement;
    std::sort(simplex.begin(), simplex.end(), vertex_less);
  }

  result.x = simplex.front().x;
  result.value = simplex.front().f;
  result.iterations = iter;
  return result;
}

}  // namespace crlearn
