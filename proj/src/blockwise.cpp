#include "crlearn/blockwise.hpp"

#include <cmath>

namespace crlearn {

Index resolve_block_len(const BlockConfig& cfg, Index n) {
  if (cfg.rule == BlockRule::SqrtRule) {
    const auto m = static_cast<Index>(
        std::floor(std::cbrt(static_cast<double>(n))));
    return std::max<Index>(1, std::min(m, n - 1));
  }
  return cfg.block_len;
}

BlockSet make_blocks(const DataMatrix& data, const BlockConfig& cfg) {
  const Index n = data.rows();
  const Index m = resolve_block_len(cfg, n);
  if (m < 1 || m >= n)
    throw Error(ErrorCode::BadBlockLen,
                "block length " + std::to_string(m) +
                    " must satisfy 1 <= m < n = " + std::to_string(n));
  return BlockSet{n, m};
}

namespace {

Matrix window_average(const Matrix& g, Index m) {
  const Index count = g.rows() - m + 1;
  Matrix smoothed(count, g.cols());
  const double inv_m = 1.0 / static_cast<double>(m);
  for (Index k = 0; k < count; ++k) {
    Eigen::RowVectorXd acc = g.row(k);
    for (Index s = 1; s < m; ++s) acc += g.row(k + s);
    smoothed.row(k) = acc * inv_m;
  }
  return smoothed;
}

}  // namespace

Matrix smoothed_moments(const DataMatrix& data, const BlockSet& blocks,
                        const Vector& beta, const MomentModel& model) {
  if (blocks.n != data.rows())
    throw Error(ErrorCode::LengthMismatch, "block set built for different data");
  Matrix g = evaluate_moments(model, data, beta);
  return window_average(g, blocks.m);
}

ContrastSolution fit_blocks(const DataMatrix& data, const MomentModel& model,
                            const CressieReadConfig& cfg,
                            const BlockConfig& bcfg,
                            const InnerSolverConfig& inner,
                            const NelderMeadConfig& nm,
                            const Vector& beta_init) {
  BlockSet blocks = make_blocks(data, bcfg);
  const Index m = blocks.m;
  const Index count = blocks.count();

  // Block-level view: row k holds the concatenated window, and the wrapped
  // model evaluates the smoothed aggregated moments for the whole view at
  // once (the base moments are computed once per beta, not once per slice).
  Matrix flat(count, m * data.cols());
  for (Index k = 0; k < count; ++k)
    for (Index s = 0; s < m; ++s)
      flat.block(k, s * data.cols(), 1, data.cols()) =
          data.values().row(k + s);
  DataMatrix block_view(std::move(flat));

  MomentModel block_mm;
  block_mm.d_y = m * data.cols();
  block_mm.d_beta = model.d_beta;
  block_mm.d_g = model.d_g;
  block_mm.beta_bounds = model.beta_bounds;
  const Index d_y = data.cols();
  block_mm.eval = [model, m, d_y](const Vector& row, const Vector& beta) {
    Vector acc = Vector::Zero(model.d_g);
    for (Index s = 0; s < m; ++s)
      acc += model.eval(row.segment(s * d_y, d_y), beta);
    return Vector(acc / static_cast<double>(m));
  };
  // Captures the original series; fit only ever pairs this model with the
  // block view built above.
  DataMatrix base_data = data;
  block_mm.eval_all = [model, base_data, m](const DataMatrix&,
                                            const Vector& beta) {
    Matrix g = evaluate_moments(model, base_data, beta);
    return window_average(g, m);
  };

  return fit(block_view, block_mm, cfg, inner, nm, beta_init);
}

}  // namespace crlearn
