#pragma once

#include <cmath>
#include <functional>

#include "slrgap/model.hpp"
#include "slrgap/solvers.hpp"

namespace slrgap {

struct BoostConfig {
  double delta = 0.02;  // assumed pair-distinguisher failure probability
  int M = 0;            // 0 means "derive from delta"

  int iterations() const {
    if (M >= 1) return M;
    return int(std::ceil(1.0 / std::sqrt(2.0 * delta)));
  }
};

// Pair sample -> SLR instance: y is the sum of the two pinned columns,
// A is the paired matrix with both pinned columns removed (p = 2d).
// The removed columns are kept for the threshold test. When the input
// carries truth, the instance gets x* = (sqrt(k+1)/2) x_{\1} placed on the
// planted half's columns and noise variance sigma2_resid + 1.
struct PairReduction {
  SlrInstance instance;
  Vector z_first;   // removed column 1 (pinned coordinate of the left half)
  Vector z_second;  // removed column d+2 (pinned coordinate of the right half)
};

PairReduction reduce_pair_to_slr(const SampleMatrix& paired);

struct PairVerdict {
  Hypothesis label = Hypothesis::PxQ;
  double stat_left = 0.0;   // (1/sqrt n) ||A x_hat - Z_1||
  double stat_right = 0.0;  // (1/sqrt n) ||A x_hat - Z_{d+2}||
  double pred_error = -1.0; // vs truth when available
  int sweeps = 0;
};

// Solves the reduced instance and thresholds: PxQ iff stat_left <= stat_right.
PairVerdict distinguish_pair(const SampleMatrix& paired, const SlrOracle& oracle);

// Binary pair test over generic batches, and a fresh-Q sampler, as consumed
// by the order-boosting algorithm.
using PairTest = std::function<Hypothesis(const SampleMatrix& left, const SampleMatrix& right)>;
using BatchSampler = std::function<SampleMatrix(RngStream& rng)>;

struct BoostResult {
  Hypothesis label = Hypothesis::Q;
  int delta_counter = 0;  // iterations in which both ordered tests agreed
  int iterations = 0;
  int pair_calls = 0;
};

// M iterations; each draws x' ~ Q and increments the counter iff
// test(x, x') = PxQ and test(x', x) = QxP; returns P iff the counter hit M.
BoostResult boost_order(const SampleMatrix& batch, const PairTest& test,
                        const BatchSampler& q_sampler, const BoostConfig& cfg,
                        RngStream& rng);

// Full NegSPCA solver: boost_order composed with distinguish_pair, pairing by
// row-wise concatenation. Requires the model parameters of batch (for the
// fresh Q draws) and an SLR oracle accepting sigma2_known = 1.5 instances.
BoostResult distinguish_negspca(const SampleMatrix& batch, const ModelParams& params,
                                const SlrOracle& oracle, const BoostConfig& cfg,
                                RngStream& rng);

// Concatenates rows of two single batches into a paired sample, propagating
// truth labels/spikes when both sides carry them.
SampleMatrix concat_batches(const SampleMatrix& left, const SampleMatrix& right);

struct WarmupVerdict {
  Hypothesis label = Hypothesis::Q;
  double statistic = 0.0;  // (1/sqrt n) ||A x_hat|| of the triggering column
  int column = 0;          // which column was used as the response
};

// Warm-up test: y = Z_1, A = Z_{\1}; P iff (1/sqrt n)||A x_hat|| > threshold.
WarmupVerdict warmup_distinguish(const SampleMatrix& samples, const SlrOracle& oracle,
                                 double threshold = 0.3);

// Unpinned variant: runs the warm-up test with every column as the response;
// P iff any statistic exceeds the threshold.
WarmupVerdict warmup_distinguish_allcols(const SampleMatrix& samples, const SlrOracle& oracle,
                                         double threshold = 0.3);

}  // namespace slrgap
