#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slrgap/rng.hpp"

namespace slrgap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Hypothesis tags for single and paired samples.
enum class Hypothesis { P, Q, PxQ, QxP };

std::string to_string(Hypothesis h);
Hypothesis hypothesis_from_string(const std::string& s);

struct ModelParams {
  int d = 0;        // ambient dimension
  int k = 0;        // sparsity
  int n = 0;        // sample count
  double theta = 0; // spike strength, in (0, 1]
  double sigma2 = 1;

  void validate() const {
    if (k < 1 || k > d) throw std::invalid_argument("ModelParams: need 1 <= k <= d");
    if (n < 1) throw std::invalid_argument("ModelParams: need n >= 1");
    if (!(theta > 0.0) || theta > 1.0)
      throw std::invalid_argument("ModelParams: need 0 < theta <= 1");
    if (sigma2 < 0.0) throw std::invalid_argument("ModelParams: need sigma2 >= 0");
  }

  // theta = (k+1)/(k+2), the value used throughout the pair reduction.
  static double default_theta(int k) { return double(k + 1) / double(k + 2); }
};

// Unit-norm sparse spike over d+1 coordinates. In the pinned variant the
// first coordinate is exactly -1/sqrt(k+1) and k of the remaining d
// coordinates are +-1/sqrt(k+1).
struct SpikeVector {
  Vector entries;            // length d+1
  std::vector<int> support;  // indices of nonzeros, ascending
  int k = 0;
  bool pinned = true;
};

SpikeVector sample_spike(int d, int k, bool pin_first, RngStream& rng);

// Uniform size-k subset of {0, ..., d-1}.
std::vector<int> sample_subset(int d, int k, RngStream& rng);

struct CovarianceSpec {
  enum class Kind { Identity, NegativeSpike };
  Kind kind = Kind::Identity;
  SpikeVector spike;   // meaningful iff kind == NegativeSpike
  double theta = 0.0;
  // c = 1 - sqrt(1-theta); (Id - c xx^T)^2 = Id - theta xx^T for unit x.
  double transform_coeff = 0.0;

  int dim() const {
    return kind == Kind::Identity ? identity_dim
                                  : static_cast<int>(spike.entries.size());
  }
  int identity_dim = 0;  // used only for Kind::Identity

  static CovarianceSpec identity(int dim) {
    CovarianceSpec s;
    s.kind = Kind::Identity;
    s.identity_dim = dim;
    return s;
  }
  static CovarianceSpec negative_spike(SpikeVector spike, double theta) {
    if (theta < 0.0 || theta > 1.0)
      throw std::invalid_argument("CovarianceSpec: need 0 <= theta <= 1");
    CovarianceSpec s;
    s.kind = Kind::NegativeSpike;
    s.spike = std::move(spike);
    s.theta = theta;
    s.transform_coeff = 1.0 - std::sqrt(1.0 - theta);
    return s;
  }
};

// n x (d+1) or n x 2(d+1) matrix of samples plus hypothesis metadata.
struct SampleMatrix {
  Matrix data;
  std::optional<Hypothesis> truth_label;
  std::optional<SpikeVector> truth_spike;  // spike of the planted half, if any
  double theta = 0.0;
  // True iff the sample was synthesized, so truth_label/truth_spike describe
  // it completely. A paired sample with truth_known and no spike is a pure
  // null pair (both halves Q), which has truth x* = 0.
  bool truth_known = false;
};

// Draws n i.i.d. rows from N(0, Id) or N(0, Id - theta xx^T).
SampleMatrix sample_model(const CovarianceSpec& spec, int n, RngStream& rng);

// Draws a PairNegSPCA sample: one spike shared across all n rows of the
// planted half, each row the concatenation of a P-draw and a Q-draw in the
// order given by label.
SampleMatrix sample_pair(Hypothesis label, const ModelParams& params, RngStream& rng);

// Conditional decomposition of the planted column: Z_1 = Z_{\1} x* + w' with
// x* = x_star_scale * x_{\1} and w' ~ N(0, sigma2_resid Id) independent of Z_{\1}.
struct PlantedSlrParams {
  double gamma = 0;
  double x_star_scale = 0;
  double sigma2_resid = 0;
};

PlantedSlrParams derive_planted_slr(int k, double theta);

struct SlrTruth {
  Vector x_star;
  double sigma2_noise = 0;
};

struct SlrInstance {
  Matrix A;  // n x p
  Vector y;  // length n
  std::optional<SlrTruth> truth;
};

// y = A x_star + w, rows of A i.i.d. from the covariance spec.
SlrInstance sample_slr_instance(const ModelParams& params, const CovarianceSpec& covariance,
                                const Vector& x_star, RngStream& rng);

}  // namespace slrgap
