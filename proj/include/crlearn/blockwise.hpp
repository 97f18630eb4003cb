#pragma once

#include "crlearn/cr_solver.hpp"
#include "crlearn/types.hpp"

namespace crlearn {

enum class BlockRule { Fixed, SqrtRule };

struct BlockConfig {
  Index block_len = 1;
  BlockRule rule = BlockRule::Fixed;
};

/// Block length implied by the config: Fixed uses block_len as given,
/// SqrtRule uses max(1, floor(n^{1/3})), which satisfies the m = o(sqrt(n))
/// growth condition.
Index resolve_block_len(const BlockConfig& cfg, Index n);

/// Overlapping index windows over a length-n series: block k covers rows
/// k .. k+m-1 (0-based), for k = 0 .. n-m.
struct BlockSet {
  Index n = 0;
  Index m = 0;

  Index count() const { return n - m + 1; }
  std::pair<Index, Index> window(Index k) const { return {k, k + m - 1}; }
};

/// Validates 1 <= m < n and returns the window set.
BlockSet make_blocks(const DataMatrix& data, const BlockConfig& cfg);

/// Smoothed aggregated moment rows: row k = (1/m) sum_{s=0}^{m-1} g(y_{k+s}, beta).
Matrix smoothed_moments(const DataMatrix& data, const BlockSet& blocks,
                        const Vector& beta, const MomentModel& model);

/// Standard minimum-discrepancy fit with the smoothed block moments playing
/// the role of the moment function over n-m+1 block observations. With m = 1
/// this reproduces the plain fit on the raw data.
ContrastSolution fit_blocks(const DataMatrix& data, const MomentModel& model,
                            const CressieReadConfig& cfg,
                            const BlockConfig& bcfg,
                            const InnerSolverConfig& inner,
                            const NelderMeadConfig& nm,
                            const Vector& beta_init);

}  // namespace crlearn
