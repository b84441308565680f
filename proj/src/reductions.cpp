#include "slrgap/reductions.hpp"

namespace slrgap {

PairReduction reduce_pair_to_slr(const SampleMatrix& paired) {
  const int cols = int(paired.data.cols());
  if (cols < 4 || cols % 2 != 0)
    throw std::invalid_argument("reduce_pair_to_slr: paired sample must have 2(d+1) columns");
  const int dp1 = cols / 2;
  const int d = dp1 - 1;
  const int n = int(paired.data.rows());

  PairReduction red;
  red.z_first = paired.data.col(0);
  red.z_second = paired.data.col(dp1);
  red.instance.y = red.z_first + red.z_second;
  red.instance.A.resize(n, 2 * d);
  red.instance.A.leftCols(d) = paired.data.middleCols(1, d);
  red.instance.A.rightCols(d) = paired.data.middleCols(dp1 + 1, d);

  if (paired.truth_known) {
    if (paired.truth_spike) {
      const SpikeVector& spike = *paired.truth_spike;
      const PlantedSlrParams ps = derive_planted_slr(spike.k, paired.theta);
      Vector x_star = Vector::Zero(2 * d);
      const int offset = (paired.truth_label == Hypothesis::QxP) ? d : 0;
      for (int j = 0; j < d; ++j)
        x_star[offset + j] = ps.x_star_scale * spike.entries[1 + j];
      red.instance.truth = SlrTruth{std::move(x_star), ps.sigma2_resid + 1.0};
    } else {
      // Null pair: both pinned columns are pure noise.
      red.instance.truth = SlrTruth{Vector::Zero(2 * d), 2.0};
    }
  }
  return red;
}

PairVerdict distinguish_pair(const SampleMatrix& paired, const SlrOracle& oracle) {
  PairReduction red = reduce_pair_to_slr(paired);
  SolveReport rep = oracle(red.instance);

  const double inv_sqrt_n = 1.0 / std::sqrt(double(red.instance.A.rows()));
  Vector fit = red.instance.A * rep.x_hat;

  PairVerdict v;
  v.stat_left = (fit - red.z_first).norm() * inv_sqrt_n;
  v.stat_right = (fit - red.z_second).norm() * inv_sqrt_n;
  // Ties go to PxQ, matching the <= in the threshold test.
  v.label = (v.stat_left <= v.stat_right) ? Hypothesis::PxQ : Hypothesis::QxP;
  v.sweeps = rep.sweeps_used;
  if (red.instance.truth)
    v.pred_error = prediction_error(red.instance.A, rep.x_hat, red.instance.truth->x_star);
  return v;
}

BoostResult boost_order(const SampleMatrix& batch, const PairTest& test,
                        const BatchSampler& q_sampler, const BoostConfig& cfg,
                        RngStream& rng) {
  BoostResult out;
  out.iterations = cfg.iterations();
  if (out.iterations < 1) throw std::invalid_argument("boost_order: M must be >= 1");

  for (int i = 0; i < out.iterations; ++i) {
    // Fresh Q batch per iteration, never reused.
    RngStream iter_rng = rng.split(std::uint64_t(i));
    SampleMatrix fresh = q_sampler(iter_rng);
    const bool forward = test(batch, fresh) == Hypothesis::PxQ;
    const bool backward = test(fresh, batch) == Hypothesis::QxP;
    out.pair_calls += 2;
    if (forward && backward) ++out.delta_counter;
  }
  out.label = (out.delta_counter == out.iterations) ? Hypothesis::P : Hypothesis::Q;
  return out;
}

SampleMatrix concat_batches(const SampleMatrix& left, const SampleMatrix& right) {
  if (left.data.rows() != right.data.rows() || left.data.cols() != right.data.cols())
    throw std::invalid_argument("concat_batches: batches must have equal shape");

  SampleMatrix out;
  out.data.resize(left.data.rows(), left.data.cols() + right.data.cols());
  out.data.leftCols(left.data.cols()) = left.data;
  out.data.rightCols(right.data.cols()) = right.data;

  if (left.truth_known && right.truth_known) {
    out.truth_known = true;
    const bool left_planted = left.truth_label == Hypothesis::P;
    const bool right_planted = right.truth_label == Hypothesis::P;
    if (left_planted && !right_planted) {
      out.truth_label = Hypothesis::PxQ;
      out.truth_spike = left.truth_spike;
      out.theta = left.theta;
    } else if (!left_planted && right_planted) {
      out.truth_label = Hypothesis::QxP;
      out.truth_spike = right.truth_spike;
      out.theta = right.theta;
    } else if (left_planted && right_planted) {
      out.truth_known = false;  // two planted halves: not a PairNegSPCA sample
    }
    // both null: truth_known with no spike
  }
  return out;
}

BoostResult distinguish_negspca(const SampleMatrix& batch, const ModelParams& params,
                                const SlrOracle& oracle, const BoostConfig& cfg,
                                RngStream& rng) {
  if (batch.data.cols() != params.d + 1)
    throw std::invalid_argument("distinguish_negspca: batch must have d+1 columns");

  PairTest test = [&oracle](const SampleMatrix& l, const SampleMatrix& r) {
    return distinguish_pair(concat_batches(l, r), oracle).label;
  };
  BatchSampler q_sampler = [&params](RngStream& r) {
    CovarianceSpec null = CovarianceSpec::identity(params.d + 1);
    return sample_model(null, params.n, r);
  };
  return boost_order(batch, test, q_sampler, cfg, rng);
}

namespace {

// Builds the single-column regression (y = Z_col, A = Z_{\col}) with truth
// attached when the batch is synthetic.
SlrInstance column_regression(const SampleMatrix& samples, int col) {
  const int p = int(samples.data.cols());
  const int n = int(samples.data.rows());
  SlrInstance inst;
  inst.y = samples.data.col(col);
  inst.A.resize(n, p - 1);
  if (col > 0) inst.A.leftCols(col) = samples.data.leftCols(col);
  if (col < p - 1) inst.A.rightCols(p - 1 - col) = samples.data.rightCols(p - 1 - col);

  if (samples.truth_known) {
    if (samples.truth_spike && samples.truth_spike->entries[col] != 0.0) {
      const SpikeVector& spike = *samples.truth_spike;
      const PlantedSlrParams ps = derive_planted_slr(spike.k, samples.theta);
      // Conditional mean of Z_col given Z_{\col}: x* = -x_col * gamma * x_{\col}.
      const double scale = -spike.entries[col] * ps.gamma;
      Vector x_star(p - 1);
      for (int j = 0, t = 0; j < p; ++j)
        if (j != col) x_star[t++] = scale * spike.entries[j];
      inst.truth = SlrTruth{std::move(x_star), ps.sigma2_resid};
    } else {
      // Null batch, or a planted batch whose spike misses this column.
      inst.truth = SlrTruth{Vector::Zero(p - 1), 1.0};
    }
  }
  return inst;
}

double warmup_statistic(const SampleMatrix& samples, const SlrOracle& oracle, int col) {
  SlrInstance inst = column_regression(samples, col);
  SolveReport rep = oracle(inst);
  return (inst.A * rep.x_hat).norm() / std::sqrt(double(inst.A.rows()));
}

}  // namespace

WarmupVerdict warmup_distinguish(const SampleMatrix& samples, const SlrOracle& oracle,
                                 double threshold) {
  WarmupVerdict v;
  v.column = 0;
  v.statistic = warmup_statistic(samples, oracle, 0);
  v.label = v.statistic > threshold ? Hypothesis::P : Hypothesis::Q;
  return v;
}

WarmupVerdict warmup_distinguish_allcols(const SampleMatrix& samples, const SlrOracle& oracle,
                                         double threshold) {
  WarmupVerdict v;
  v.label = Hypothesis::Q;
  for (int col = 0; col < samples.data.cols(); ++col) {
    double stat = warmup_statistic(samples, oracle, col);
    if (stat > v.statistic) {
      v.statistic = stat;
      v.column = col;
    }
    if (stat > threshold) {
      v.label = Hypothesis::P;
      v.statistic = stat;
      v.column = col;
      break;
    }
  }
  return v;
}

}  // namespace slrgap
