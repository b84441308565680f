#include "slrgap/model.hpp"

#include <algorithm>

namespace slrgap {

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::P: return "P";
    case Hypothesis::Q: return "Q";
    case Hypothesis::PxQ: return "PxQ";
    case Hypothesis::QxP: return "QxP";
  }
  return "?";
}

Hypothesis hypothesis_from_string(const std::string& s) {
  if (s == "P") return Hypothesis::P;
  if (s == "Q") return Hypothesis::Q;
  if (s == "PxQ") return Hypothesis::PxQ;
  if (s == "QxP") return Hypothesis::QxP;
  throw std::invalid_argument("unknown hypothesis label: " + s);
}

SpikeVector sample_spike(int d, int k, bool pin_first, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("sample_spike: k must be >= 1");
  if (k > d) throw std::invalid_argument("sample_spike: k must be <= d");

  SpikeVector spike;
  spike.k = k;
  spike.pinned = pin_first;
  spike.entries = Vector::Zero(d + 1);
  const double mag = 1.0 / std::sqrt(double(k + 1));

  if (pin_first) {
    // First coordinate pinned, uniform size-k support among coordinates 1..d.
    spike.entries[0] = -mag;
    spike.support.push_back(0);
    std::vector<int> idx = sample_subset(d, k, rng);
    for (int j : idx) {
      spike.entries[1 + j] = (rng.next_u64() & 1) ? mag : -mag;
      spike.support.push_back(1 + j);
    }
  } else {
    // Uniform (k+1)-sparse sign vector over all d+1 coordinates.
    std::vector<int> idx = sample_subset(d + 1, k + 1, rng);
    for (int j : idx) {
      spike.entries[j] = (rng.next_u64() & 1) ? mag : -mag;
      spike.support.push_back(j);
    }
  }
  std::sort(spike.support.begin(), spike.support.end());
  return spike;
}

std::vector<int> sample_subset(int d, int k, RngStream& rng) {
  // Floyd's algorithm: uniform size-k subset of {0, ..., d-1}.
  std::vector<int> out;
  out.reserve(k);
  for (int j = d - k; j < d; ++j) {
    int t = static_cast<int>(rng.next_below(std::uint64_t(j) + 1));
    if (std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
    else
      out.push_back(j);
  }
  return out;
}

SampleMatrix sample_model(const CovarianceSpec& spec, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_model: n must be >= 1");
  const int p = spec.dim();
  if (p < 1) throw std::invalid_argument("sample_model: empty covariance spec");

  SampleMatrix out;
  out.data.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) out.data(i, j) = rng.next_gaussian();

  if (spec.kind == CovarianceSpec::Kind::NegativeSpike) {
    // z = g - c <x,g> x; (Id - c xx^T)^2 = Id - theta xx^T, exact at theta=1.
    const Vector& x = spec.spike.entries;
    const double c = spec.transform_coeff;
    Vector proj = out.data * x;  // <x, g_i> per row
    out.data.noalias() -= (c * proj) * x.transpose();
    out.truth_label = Hypothesis::P;
    out.truth_spike = spec.spike;
    out.theta = spec.theta;
  } else {
    out.truth_label = Hypothesis::Q;
  }
  out.truth_known = true;
  return out;
}

SampleMatrix sample_pair(Hypothesis label, const ModelParams& params, RngStream& rng) {
  if (label != Hypothesis::PxQ && label != Hypothesis::QxP)
    throw std::invalid_argument("sample_pair: label must be PxQ or QxP");
  params.validate();
  if (!(params.theta < 1.0))
    throw std::invalid_argument("sample_pair: need theta in (0,1)");

  RngStream spike_rng = rng.split(0);
  RngStream data_rng = rng.split(1);
  SpikeVector spike = sample_spike(params.d, params.k, /*pin_first=*/true, spike_rng);
  CovarianceSpec planted = CovarianceSpec::negative_spike(spike, params.theta);
  CovarianceSpec null = CovarianceSpec::identity(params.d + 1);

  RngStream left_rng = data_rng.split(0);
  RngStream right_rng = data_rng.split(1);
  SampleMatrix left = sample_model(label == Hypothesis::PxQ ? planted : null,
                                   params.n, left_rng);
  SampleMatrix right = sample_model(label == Hypothesis::QxP ? planted : null,
                                    params.n, right_rng);

  SampleMatrix out;
  out.data.resize(params.n, 2 * (params.d + 1));
  out.data.leftCols(params.d + 1) = left.data;
  out.data.rightCols(params.d + 1) = right.data;
  out.truth_label = label;
  out.truth_spike = std::move(spike);
  out.theta = params.theta;
  out.truth_known = true;
  return out;
}

PlantedSlrParams derive_planted_slr(int k, double theta) {
  if (k < 1) throw std::invalid_argument("derive_planted_slr: k must be >= 1");
  // theta = 1 is the degenerate warm-up case; the formulas stay regular there
  // (gamma = k+1, residual variance 0).
  if (!(theta > 0.0) || theta > 1.0)
    throw std::invalid_argument("derive_planted_slr: need theta in (0,1]");
  const double frac = theta * double(k) / double(k + 1);
  if (frac >= 1.0)
    throw std::invalid_argument("derive_planted_slr: theta*k/(k+1) must be < 1");
  PlantedSlrParams out;
  out.gamma = theta / (1.0 - frac);
  out.x_star_scale = out.gamma / std::sqrt(double(k + 1));
  out.sigma2_resid = 1.0 - out.gamma / double(k + 1);
  return out;
}

SlrInstance sample_slr_instance(const ModelParams& params, const CovarianceSpec& covariance,
                                const Vector& x_star, RngStream& rng) {
  if (covariance.dim() != x_star.size())
    throw std::invalid_argument("sample_slr_instance: dimension mismatch");

  RngStream design_rng = rng.split(0);
  RngStream noise_rng = rng.split(1);

  SlrInstance inst;
  inst.A = sample_model(covariance, params.n, design_rng).data;
  inst.y = inst.A * x_star;
  const double sigma = std::sqrt(params.sigma2);
  for (int i = 0; i < params.n; ++i) inst.y[i] += sigma * noise_rng.next_gaussian();
  inst.truth = SlrTruth{x_star, params.sigma2};
  return inst;
}

}  // namespace slrgap
