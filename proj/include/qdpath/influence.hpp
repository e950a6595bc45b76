// Copyright 2026 The qdpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <utility>
#include <vector>

#include "qdpath/bath.hpp"
#include "qdpath/errors.hpp"
#include "qdpath/liouville.hpp"

/// @file influence.hpp
/// Influence-functional factor tables.
///
/// A discretized path pair assigns to each time slice l a ket state nu_l and
/// a bra state mu_l; we pack them into one slice index p = nu * N + mu.  The
/// bath contributes, for every ordered slice pair (l, l') with l' <= l and
/// lag = l - l' below the memory depth, a log-weight
///
///   S(lag; nu_l, mu_l, nu_l', mu_l') =
///       - K_{nu_l' nu_l}(lag) - conj(K_{mu_l mu_l'}(lag))
///       + conj(K_{nu_l mu_l'}(lag)) + K_{nu_l' mu_l}(lag),
///
/// where K is the discretized memory kernel (equal-time form at lag 0).
/// The table stores F[lag](p_l, p_l') = exp(S) so the propagation loop does
/// lookups only; for N <= 3 and depth <= 14 this is at most ~10^3 entries.
///
/// Slice pairs with lag >= depth are truncated abruptly (factor 1); the
/// stored lags therefore fully determine the truncated path sum.

namespace qdpath {

/// Precomputed exp(S) factors, indexed factors[lag](p_new, p_old) with
/// p = nu * N + mu.  Only the diagonal of factors[0] is meaningful to the
/// propagation (a slice pairs with itself exactly once), but the full lag-0
/// matrix is stored for uniformity.
struct InfluenceTable {
  int dim = 0;
  int depth = 0;
  std::vector<Matrix> factors;

  Complex at(int lag, int nu_l, int mu_l, int nu_lp, int mu_lp) const {
    return factors.at(lag)(nu_l * dim + mu_l, nu_lp * dim + mu_lp);
  }

  /// True when every factor equals 1 exactly (zero-coupling case).
  bool trivial() const {
    for (const auto& f : factors) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
          if (f(i, j) != Complex(1.0, 0.0)) return false;
        }
      }
    }
    return true;
  }
};

/// Log-weight of a single ordered slice pair at the given lag; lag >= table
/// depth returns 0 (truncated).
inline Complex pair_action(const MemoryKernelTable& kernels, int lag, int nu_l,
                           int mu_l, int nu_lp, int mu_lp) {
  if (lag >= kernels.depth) return {0.0, 0.0};
  const Matrix& k = kernels.entries[lag];
  return -k(nu_lp, nu_l) - std::conj(k(mu_l, mu_lp)) +
         std::conj(k(nu_l, mu_lp)) + k(nu_lp, mu_l);
}

/// Exponentiates the four-kernel combination for every (lag, slice-pair,
/// slice-pair) combination of the kernel table.
inline InfluenceTable build_influence_table(const MemoryKernelTable& kernels) {
  const int n = kernels.dim;
  detail::require_config(n >= 1 && kernels.depth >= 1,
                         "build_influence_table: empty kernel table");
  InfluenceTable table;
  table.dim = n;
  table.depth = kernels.depth;
  table.factors.assign(kernels.depth, Matrix::Zero(n * n, n * n));
  for (int lag = 0; lag < kernels.depth; ++lag) {
    for (int nu_l = 0; nu_l < n; ++nu_l) {
      for (int mu_l = 0; mu_l < n; ++mu_l) {
        for (int nu_lp = 0; nu_lp < n; ++nu_lp) {
          for (int mu_lp = 0; mu_lp < n; ++mu_lp) {
            table.factors[lag](nu_l * n + mu_l, nu_lp * n + mu_lp) =
                std::exp(pair_action(kernels, lag, nu_l, mu_l, nu_lp, mu_lp));
          }
        }
      }
    }
  }
  return table;
}

/// Influence table with every factor exactly 1 (no bath memory); depth is
/// still needed because the propagation engine sizes its history by it.
inline InfluenceTable trivial_influence_table(int dim, int depth) {
  InfluenceTable table;
  table.dim = dim;
  table.depth = depth;
  table.factors.assign(depth, Matrix::Ones(dim * dim, dim * dim));
  return table;
}

/// Total log-weight of a short path segment: sum of pair_action over all
/// ordered pairs (l, l'), l' <= l, inside the segment.  segment[i] = (nu, mu)
/// in time order.  Pairs whose lag exceeds the stored depth contribute 0,
/// matching the abrupt truncation used everywhere else.
inline Complex truncated_action(
    const MemoryKernelTable& kernels,
    const std::vector<std::pair<int, int>>& segment) {
  detail::require_config(!segment.empty(),
                         "truncated_action: segment must be non-empty");
  Complex total{0.0, 0.0};
  for (std::size_t l = 0; l < segment.size(); ++l) {
    for (std::size_t lp = 0; lp <= l; ++lp) {
      total += pair_action(kernels, static_cast<int>(l - lp), segment[l].first,
                           segment[l].second, segment[lp].first,
                           segment[lp].second);
    }
  }
  return total;
}

}  // namespace qdpath
