#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "slrgap/rng.hpp"

namespace slrgap {

// Constant of the (C*l)^l (1/d + l/k^2)^l overlap-moment bound, fitted as the
// minimal value dominating the exact moments on the enumeration grid
// (d <= 10, k <= 3, l <= 4), rounded up to one decimal. Recomputed and checked
// by the test suite.
inline constexpr double kMomentBoundC = 0.5;

enum class MomentMethod { ExactEnumeration, MonteCarlo, LemmaBound };

struct MomentConfig {
  int d = 0;
  int k = 0;
  int ell = 0;  // moment order: E <x1,x2>^(2 ell)
  bool include_first = false;
};

struct MomentEstimate {
  double value_log = 0.0;  // natural log of the moment
  MomentMethod method = MomentMethod::ExactEnumeration;
  double stderr_log = 0.0;  // relative (log-space) uncertainty, Monte Carlo only
  double value = 0.0;       // linear-scale value (moments here never underflow)
  double stderr_lin = 0.0;
  MomentConfig config;
};

// Exact expectation of <x^(1), x^(2)>^(2 ell) over two independent draws of
// the sparse spike prior (first coordinates excluded unless include_first,
// in which case the pinned product 1/(k+1) is added to the inner product).
// Symmetry: x^(1) is fixed to the canonical support, only x^(2) enumerated.
MomentEstimate overlap_moment_exact(int d, int k, int ell, bool include_first,
                                    std::int64_t budget = 100000000);

MomentEstimate overlap_moment_mc(int d, int k, int ell, bool include_first,
                                 std::int64_t trials, RngStream& rng);

// log of (C ell)^ell (1/d + ell/k^2)^ell.
double moment_bound_b4(std::int64_t d, std::int64_t k, int ell,
                       double c_const = kMomentBoundC);

struct BinomialMoment {
  double exact_log;  // log E B^ell, B ~ Bin(k, k/d)
  double bound_log;  // log (k^2/d + ell/2)^ell
};

// Exact binomial moment plus its closed-form bound; throws if the bound is
// violated. Requires k <= 100.
BinomialMoment binomial_moment(int k, int d, int ell);

struct LdlrParams {
  std::int64_t d = 0;
  std::int64_t k = 0;
  std::int64_t n = 0;
  int D = 0;             // polynomial degree
  double theta = 0.0;
  double c_const = kMomentBoundC;
  double delta_exp = 0.1;
  std::int64_t mc_trials = 100000;
};

struct LdlrNormBound {
  double excess_log;   // log(bound - 1); -inf when the sums are empty
  double total_log;    // log(bound)
  double total;        // linear value when representable
  int dominant_ell;    // index of the largest term (0 when empty)
  int dominant_sum;    // 1 = moment sum, 2 = pinned-coordinate sum
};

// Degree-D norm bound chain
//   ||L||^2 <= 1 + sum_l (16 max(n,D)/l)^l m_l + sum_l (16 max(n,D)/((k+1)^2 l))^l,
// l = 1..floor(D/2), evaluated term-wise in log space.
LdlrNormBound ldlr_norm_bound(const LdlrParams& params, MomentMethod moment_source,
                              RngStream* rng = nullptr);

struct SqHighDegBound {
  double rhs_log;     // log of l^(2l^2) (1-4 theta^2)^(2l^2) E<x1,x2>^(2l(l+1))
  double target_log;  // log of k^(-l^2/3)
  bool passes;        // rhs <= target
  double moment_log;  // log of the moment factor used
};

SqHighDegBound sq_highdeg_bound(std::int64_t d, std::int64_t k, int ell, double theta,
                                MomentMethod moment_source = MomentMethod::LemmaBound,
                                double c_const = kMomentBoundC);

struct SqCertificate {
  int ell = 0;
  double log2_q = 0.0;       // q = 2^ell
  double gamma_hd_log = 0.0;
  double eps = 0.0;
  double sda_arg_log = 0.0;  // log of n / (q^(2/l) (l eps^(2/l) + gamma^(2/l) n))
  double threshold_log = 0.0;  // log of n / (100 k^delta)
  bool passes = false;
  bool degenerate = false;  // eps = gamma = 0: argument is +inf, trivially passes
};

SqCertificate sda_certificate(std::int64_t d, std::int64_t k, std::int64_t n,
                              double delta_exp, double eps_measured, double gamma_hd_log);

}  // namespace slrgap
