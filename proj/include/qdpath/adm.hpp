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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "qdpath/errors.hpp"
#include "qdpath/influence.hpp"
#include "qdpath/liouville.hpp"

/// @file adm.hpp
/// Iterative propagation of the augmented weight tensor.
///
/// The augmented tensor W holds one complex weight per configuration of the
/// d most recent time slices, each slice being a ket/bra pair packed as
/// p = nu * N + mu.  Layout: a flat array addressed as a base-N^2 digit
/// string with the NEWEST slice as the most-significant digit and the oldest
/// as the least-significant one.  Consequences:
///   - reducing to the physical state (sum over everything but the newest
///     slice) is a sum over contiguous blocks;
///   - summing out the oldest slice at full depth is a contiguous stride-1
///     reduction.
///
/// One step multiplies, for every new slice value p_n, the per-step
/// propagator element M(p_n <- p_{n-1}), the self factor F_0(p_n), and the
/// lag factors F_k(p_n, p_{n-k}) for every retained slice, then (at full
/// depth) sums out the slice falling off the history window.  Start-up is
/// exact: for the first memory_depth steps the tensor rank grows by one per
/// step and nothing is summed out, so short propagations reproduce the
/// untruncated path sum identically.  The initial slice (the state before
/// the first step) carries no influence factors and is summed immediately
/// in step 1.
///
/// Factor products along the digit string are accumulated top-down in a
/// fixed order, so results are bit-identical for any worker count.

namespace qdpath {

/// What to do with the slowly drifting tensor trace (Trotter error).
enum class TracePolicy { monitor_only, renormalize_each_step };

/// Hard upper bound on the memory depth; beyond this the tensor cannot fit
/// in commodity memory for any N >= 2.
inline constexpr int kMaxMemoryDepth = 14;

/// Knobs for one propagation run.
struct SimulationConfig {
  double dt = 0.5;               // step length (ps)
  int n_steps = 100;             // number of steps to take
  int memory_depth = 1;          // retained history slices (n_c)
  DensityMatrix initial_state;   // rho(0)
  TracePolicy trace_policy = TracePolicy::monitor_only;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;  // 2 GiB default
  int threads = 1;               // per-step contraction workers
};

/// Peak tensor storage for a given dimension/depth: two ping-pong buffers
/// plus the marginalization scratch.  Saturates at SIZE_MAX on overflow.
inline std::size_t adm_bytes_estimate(int dim, int memory_depth) {
  const long double n2 = static_cast<long double>(dim) * dim;
  long double tensor = 1.0L;
  for (int i = 0; i < memory_depth; ++i) tensor *= n2;
  const long double marg = memory_depth >= 2 ? tensor / n2 : 0.0L;
  const long double bytes = (2.0L * tensor + marg) * sizeof(Complex);
  if (bytes > 9e17L) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(bytes);
}

/// Propagation output: the state trajectory plus per-step diagnostics.
struct TimeSeries {
  std::vector<double> t_ps;
  std::vector<DensityMatrix> states;
  std::vector<double> trace_drift;     // |Tr - 1| before any renormalization
  std::vector<double> renorm_factors;  // |trace| divided out (1 if monitoring)
  double max_hermiticity_defect = 0.0;
  double wall_ms_per_step = 0.0;
  std::size_t peak_bytes = 0;
};

/// The augmented weight tensor with its growth/steady iteration.
class AugmentedDensityMatrix {
 public:
  /// Depth-0 tensor whose reduction is exactly config.initial_state.
  explicit AugmentedDensityMatrix(const SimulationConfig& config)
      : dim_(static_cast<int>(config.initial_state.rows())),
        n2_(dim_ * dim_),
        nc_(config.memory_depth) {
    detail::require_config(dim_ >= 1, "initialize: empty initial state");
    detail::require_config(nc_ >= 1 && nc_ <= kMaxMemoryDepth,
                           "initialize: memory_depth must be in [1, " +
                               std::to_string(kMaxMemoryDepth) + "]");
    const std::size_t need = adm_bytes_estimate(dim_, nc_);
    detail::require_config(
        need <= config.memory_budget_bytes,
        "initialize: tensor storage " + std::to_string(need) +
            " bytes exceeds the memory budget of " +
            std::to_string(config.memory_budget_bytes) +
            " bytes (reduce memory_depth or raise the budget)");
    validate_density_matrix(config.initial_state, 1e-9);
    w_.assign(n2_, Complex{});
    for (int nu = 0; nu < dim_; ++nu) {
      for (int mu = 0; mu < dim_; ++mu) {
        w_[static_cast<std::size_t>(nu) * dim_ + mu] =
            config.initial_state(nu, mu);
      }
    }
    depth_ = 0;
  }

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  int memory_depth() const { return nc_; }

  /// Bytes held by the tensor buffers right now.
  std::size_t bytes_in_use() const {
    return (w_.capacity() + scratch_.capacity() + marg_.capacity()) *
           sizeof(Complex);
  }

  /// Advances one step with the given per-step propagator and influence
  /// factors.  The propagator must be built for this step's time arguments;
  /// the influence table must have depth == memory_depth.
  void step(const Superoperator& m, const InfluenceTable& influence,
            int threads = 1) {
    detail::require_config(m.dim == dim_,
                           "step: propagator dimension mismatch");
    detail::require_config(influence.dim == dim_ && influence.depth == nc_,
                           "step: influence table does not match this tensor");
    remap_propagator(m);
    const Matrix& f0 = influence.factors[0];

    if (depth_ == 0 || nc_ == 1) {
      // Entry step (slice 0 carries no influence factors and is summed now)
      // and the depth-1 steady state share one contraction:
      //   out[p] = F0(p) * sum_q M(p <- q) w[q].
      scratch_.assign(n2_, Complex{});
      for (int p = 0; p < n2_; ++p) {
        Complex acc{};
        const Complex* row = &mp_[static_cast<std::size_t>(p) * n2_];
        for (int q = 0; q < n2_; ++q) acc += row[q] * w_[q];
        scratch_[p] = f0(p, p) * acc;
      }
      w_.swap(scratch_);
      depth_ = 1;
      return;
    }

    const bool steady = depth_ == nc_;
    const Complex* in = w_.data();
    int in_digits = depth_;
    if (steady) {
      // Sum out the oldest slice (contiguous stride-1 blocks) first; it is
      // paired with nothing in the new step, so the sum commutes with all
      // remaining factors.
      std::size_t out_size = 1;
      for (int i = 0; i < nc_ - 1; ++i) out_size *= n2_;
      marg_.resize(out_size);
      for (std::size_t q = 0; q < out_size; ++q) {
        const Complex* block = &w_[q * n2_];
        Complex acc{};
        for (int e = 0; e < n2_; ++e) acc += block[e];
        marg_[q] = acc;
      }
      in = marg_.data();
      in_digits = nc_ - 1;
    }

    // Per-level factor rows for the current newest-slice value p:
    //   level j (digit at lag j+1) carries F_{j+1}(p, d); level 0 also
    //   carries the propagator element and the self factor F_0(p).
    std::size_t block = 1;
    for (int i = 0; i < in_digits; ++i) block *= n2_;
    scratch_.resize(static_cast<std::size_t>(n2_) * block);

    const int workers =
        (threads > 1 && block >= (std::size_t{1} << 12))
            ? std::min(threads, n2_)
            : 1;
    const auto do_blocks = [&](int p_begin, int p_end) {
      std::vector<Complex> g(static_cast<std::size_t>(in_digits) * n2_);
      for (int p = p_begin; p < p_end; ++p) {
        for (int j = 0; j < in_digits; ++j) {
          const Matrix& fj = influence.factors[j + 1];
          for (int d = 0; d < n2_; ++d) {
            g[static_cast<std::size_t>(j) * n2_ + d] = fj(p, d);
          }
        }
        const Complex* row = &mp_[static_cast<std::size_t>(p) * n2_];
        const Complex self = f0(p, p);
        for (int d = 0; d < n2_; ++d) g[d] *= self * row[d];
        fill_block(&scratch_[static_cast<std::size_t>(p) * block], in,
                   g.data(), in_digits, 0, 0, Complex{1.0, 0.0});
      }
    };
    if (workers == 1) {
      do_blocks(0, n2_);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      const int per = (n2_ + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const int b = w * per;
        const int e = std::min(n2_, b + per);
        if (b < e) pool.emplace_back(do_blocks, b, e);
      }
      for (auto& th : pool) th.join();
    }

    w_.swap(scratch_);
    depth_ = steady ? nc_ : depth_ + 1;
  }

  /// Physical state: sum over all slices except the newest.  Compensated
  /// summation in a fixed order (both for accuracy over large tensors and
  /// for bit-reproducibility).
  DensityMatrix reduce() const {
    DensityMatrix rho(dim_, dim_);
    if (depth_ == 0) {
      for (int nu = 0; nu < dim_; ++nu) {
        for (int mu = 0; mu < dim_; ++mu) {
          rho(nu, mu) = w_[static_cast<std::size_t>(nu) * dim_ + mu];
        }
      }
      return rho;
    }
    std::size_t block = 1;
    for (int i = 0; i < depth_ - 1; ++i) block *= n2_;
    for (int p = 0; p < n2_; ++p) {
      detail::KahanAccumulatorC acc;
      const Complex* base = &w_[static_cast<std::size_t>(p) * block];
      for (std::size_t i = 0; i < block; ++i) acc.add(base[i]);
      rho(p / dim_, p % dim_) = acc.sum();
    }
    return rho;
  }

  /// Divides all weights by the trace of the given reduction (callers pass
  /// the value they just obtained from reduce() to avoid a second pass).
  /// Returns the complex trace divided out.  A trace magnitude below 1e-6
  /// signals a degenerate parameter choice and raises NumericalError.
  Complex renormalize(const DensityMatrix& current_reduction) {
    const Complex tr = current_reduction.trace();
    detail::require_numeric(std::isfinite(tr.real()) && std::isfinite(tr.imag()),
                            "renormalize: non-finite tensor trace");
    detail::require_numeric(std::abs(tr) >= 1e-6,
                            "renormalize: tensor trace collapsed below 1e-6");
    const Complex inv = Complex{1.0, 0.0} / tr;
    for (auto& x : w_) x *= inv;
    return tr;
  }

 private:
  /// Recursive digit walk: writes out[I] = prod(factors along digits) * in[I]
  /// for every digit string I, innermost digit contiguous.
  void fill_block(Complex* out, const Complex* in, const Complex* g,
                  int n_levels, int level, std::size_t base,
                  Complex prod) const {
    const Complex* gl = &g[static_cast<std::size_t>(level) * n2_];
    if (level == n_levels - 1) {
      Complex* o = &out[base * n2_];
      const Complex* v = &in[base * n2_];
      for (int d = 0; d < n2_; ++d) o[d] = prod * gl[d] * v[d];
      return;
    }
    for (int d = 0; d < n2_; ++d) {
      fill_block(out, in, g, n_levels, level + 1, base * n2_ + d,
                 prod * gl[d]);
    }
  }

  /// Propagator matrix rearranged to slice-pair digits: mp_[p_out*N^2+p_in]
  /// with p = nu*N + mu, from the column-major vectorization nu + N*mu.
  void remap_propagator(const Superoperator& m) {
    mp_.resize(static_cast<std::size_t>(n2_) * n2_);
    for (int no = 0; no < dim_; ++no) {
      for (int mo = 0; mo < dim_; ++mo) {
        for (int ni = 0; ni < dim_; ++ni) {
          for (int mi = 0; mi < dim_; ++mi) {
            mp_[static_cast<std::size_t>(no * dim_ + mo) * n2_ +
                (ni * dim_ + mi)] = m.m(no + dim_ * mo, ni + dim_ * mi);
          }
        }
      }
    }
  }

  int dim_;
  int n2_;
  int nc_;
  int depth_ = 0;
  std::vector<Complex> w_, scratch_, marg_, mp_;
};

/// Full orchestration: per-step propagators from the (possibly
/// time-dependent) Hamiltonian and channels, tensor iteration, trajectory
/// and diagnostics.  The influence table must match memory_depth; pass
/// trivial_influence_table(dim, 1) with memory_depth = 1 for bath-free runs.
inline TimeSeries run_path_integral(const SimulationConfig& config,
                                    const HamiltonianSpec& h,
                                    const std::vector<LindbladChannel>& channels,
                                    const InfluenceTable& influence) {
  detail::require_config(config.dt > 0.0, "run: dt must be > 0");
  detail::require_config(config.n_steps >= 0, "run: n_steps must be >= 0");
  detail::require_config(h.dim == static_cast<int>(config.initial_state.rows()),
                         "run: Hamiltonian and initial state dimensions differ");
  detail::require_config(influence.dim == h.dim,
                         "run: influence table dimension mismatch");

  AugmentedDensityMatrix adm(config);
  TimeSeries out;
  out.t_ps.reserve(config.n_steps + 1);
  out.states.reserve(config.n_steps + 1);
  out.trace_drift.reserve(config.n_steps + 1);
  out.renorm_factors.reserve(config.n_steps + 1);

  out.t_ps.push_back(0.0);
  out.states.push_back(adm.reduce());
  out.trace_drift.push_back(std::abs(trace_deviation(out.states.back())));
  out.renorm_factors.push_back(1.0);

  const auto t_start = std::chrono::steady_clock::now();
  for (int n = 0; n < config.n_steps; ++n) {
    const Superoperator m =
        build_step_propagator(h, channels, n * config.dt, config.dt);
    adm.step(m, influence, config.threads);
    DensityMatrix rho = adm.reduce();

    const double drift = std::abs(trace_deviation(rho));
    detail::require_numeric(std::isfinite(drift),
                            "run: non-finite state at step " + std::to_string(n));
    double factor = 1.0;
    if (config.trace_policy == TracePolicy::renormalize_each_step) {
      const Complex tr = adm.renormalize(rho);
      rho /= tr;
      factor = std::abs(tr);
    }
    out.max_hermiticity_defect =
        std::max(out.max_hermiticity_defect, hermiticity_defect(rho));
    out.t_ps.push_back((n + 1) * config.dt);
    out.states.push_back(std::move(rho));
    out.trace_drift.push_back(drift);
    out.renorm_factors.push_back(factor);
  }
  const auto t_end = std::chrono::steady_clock::now();
  const double total_ms =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();
  out.wall_ms_per_step = config.n_steps > 0 ? total_ms / config.n_steps : 0.0;
  out.peak_bytes = adm.bytes_in_use();
  return out;
}

}  // namespace qdpath
