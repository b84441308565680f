#include "slrgap/ldlr.hpp"

#include "slrgap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace slrgap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& logs) {
  double m = kNegInf;
  for (double v : logs) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

long double binom_ld(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double c = 1.0L;
  for (int i = 0; i < k; ++i) c = c * (long double)(n - i) / (long double)(i + 1);
  return c;
}

}  // namespace

MomentEstimate overlap_moment_exact(int d, int k, int ell, bool include_first,
                                    std::int64_t budget) {
  if (k < 1 || k > d) throw std::invalid_argument("overlap_moment_exact: need 1 <= k <= d");
  if (ell < 0) throw std::invalid_argument("overlap_moment_exact: need ell >= 0");

  const long double patterns = binom_ld(d, k) * std::pow(2.0L, k);
  if (patterns * patterns > (long double)budget)
    throw std::invalid_argument(
        "overlap_moment_exact: enumeration needs " +
        std::to_string((double)(patterns * patterns)) + " pair evaluations, over budget " +
        std::to_string(budget) + "; use overlap_moment_mc instead");

  // x^(1) fixed to support {0..k-1} with positive signs (valid by symmetry of
  // the prior); x^(2) enumerated over all supports and sign patterns.
  const double unit = 1.0 / double(k + 1);
  const double first_term = include_first ? unit : 0.0;

  long double total = 0.0L;
  long double count = 0.0L;
  std::vector<int> comb(k);
  for (int i = 0; i < k; ++i) comb[i] = i;
  while (true) {
    // Coordinates of support2 that overlap the canonical support {0..k-1}.
    int m = 0;
    for (int i = 0; i < k; ++i)
      if (comb[i] < k) ++m;
    // Sum over sign patterns; only the m intersecting signs matter.
    for (std::uint32_t bits = 0; bits < (1u << k); ++bits) {
      int dot = 0;
      for (int i = 0; i < k; ++i)
        if (comb[i] < k) dot += (bits >> i) & 1 ? 1 : -1;
      long double overlap = (long double)dot * unit + first_term;
      long double term = 1.0L;
      for (int e = 0; e < 2 * ell; ++e) term *= overlap;
      total += term;
      count += 1.0L;
    }
    int i = k - 1;
    while (i >= 0 && comb[i] == d - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }

  MomentEstimate est;
  est.method = MomentMethod::ExactEnumeration;
  est.value = double(total / count);
  est.value_log = std::log(est.value);
  est.config = MomentConfig{d, k, ell, include_first};
  return est;
}

MomentEstimate overlap_moment_mc(int d, int k, int ell, bool include_first,
                                 std::int64_t trials, RngStream& rng) {
  if (trials < 1000) throw std::invalid_argument("overlap_moment_mc: need trials >= 1000");

  const double unit = 1.0 / double(k + 1);
  const double first_term = include_first ? unit : 0.0;

  // Only the signed intersection count matters; draw the two supports and
  // signs directly instead of materializing d-vectors.
  std::vector<char> in_first(d, 0);
  std::vector<signed char> sign_first(d, 0);
  long double sum = 0.0L, sum_sq = 0.0L;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::fill(in_first.begin(), in_first.end(), 0);
    std::vector<int> s1 = sample_subset(d, k, rng);
    for (int j : s1) {
      in_first[j] = 1;
      sign_first[j] = (rng.next_u64() & 1) ? 1 : -1;
    }
    std::vector<int> s2 = sample_subset(d, k, rng);
    int dot = 0;
    for (int j : s2) {
      int sgn = (rng.next_u64() & 1) ? 1 : -1;
      if (in_first[j]) dot += sgn * sign_first[j];
    }
    long double overlap = (long double)dot * unit + first_term;
    long double term = 1.0L;
    for (int e = 0; e < 2 * ell; ++e) term *= overlap;
    sum += term;
    sum_sq += term * term;
  }

  MomentEstimate est;
  est.method = MomentMethod::MonteCarlo;
  est.value = double(sum / trials);
  const double var = std::max(0.0, double(sum_sq / trials) - est.value * est.value);
  est.stderr_lin = std::sqrt(var / double(trials));
  est.value_log = std::log(est.value);
  est.stderr_log = est.value > 0 ? est.stderr_lin / est.value : 0.0;
  est.config = MomentConfig{d, k, ell, include_first};
  return est;
}

double moment_bound_b4(std::int64_t d, std::int64_t k, int ell, double c_const) {
  if (ell < 1) throw std::invalid_argument("moment_bound_b4: need ell >= 1");
  if (c_const <= 0) throw std::invalid_argument("moment_bound_b4: need C > 0");
  const double l = double(ell);
  return l * std::log(c_const * l) +
         l * std::log(1.0 / double(d) + l / (double(k) * double(k)));
}

BinomialMoment binomial_moment(int k, int d, int ell) {
  if (k < 1 || k > 100) throw std::invalid_argument("binomial_moment: need 1 <= k <= 100");
  if (d < k) throw std::invalid_argument("binomial_moment: need d >= k");
  if (ell < 0) throw std::invalid_argument("binomial_moment: need ell >= 0");

  const long double p = (long double)k / (long double)d;
  long double exact = 0.0L;
  for (int j = 0; j <= k; ++j) {
    long double prob = binom_ld(k, j) * std::pow(p, j) * std::pow(1.0L - p, k - j);
    exact += prob * std::pow((long double)j, ell);
  }
  BinomialMoment out;
  out.exact_log = ell == 0 ? 0.0 : std::log(double(exact));
  const double base = double(k) * double(k) / double(d) + double(ell) / 2.0;
  out.bound_log = double(ell) * std::log(base);
  if (out.exact_log > out.bound_log + 1e-12)
    throw std::logic_error("binomial_moment: exact moment exceeds its bound");
  return out;
}

namespace {

double log_moment(const LdlrParams& params, int ell, MomentMethod source, RngStream* rng) {
  switch (source) {
    case MomentMethod::ExactEnumeration:
      return overlap_moment_exact(int(params.d), int(params.k), ell, false).value_log;
    case MomentMethod::MonteCarlo: {
      if (!rng) throw std::invalid_argument("ldlr_norm_bound: Monte Carlo source needs an rng");
      return overlap_moment_mc(int(params.d), int(params.k), ell, false,
                               params.mc_trials, *rng).value_log;
    }
    case MomentMethod::LemmaBound:
      return moment_bound_b4(params.d, params.k, ell, params.c_const);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

LdlrNormBound ldlr_norm_bound(const LdlrParams& params, MomentMethod moment_source,
                              RngStream* rng) {
  if (params.D < 0) throw std::invalid_argument("ldlr_norm_bound: need D >= 0");
  const int L = params.D / 2;
  const double max_nd = double(std::max<std::int64_t>(params.n, params.D));
  const double kp1_sq = (double(params.k) + 1.0) * (double(params.k) + 1.0);

  std::vector<double> term_logs;
  LdlrNormBound out{kNegInf, 0.0, 1.0, 0, 0};
  double best = kNegInf;
  for (int ell = 1; ell <= L; ++ell) {
    const double l = double(ell);
    double t1 = l * std::log(16.0 * max_nd / l) + log_moment(params, ell, moment_source, rng);
    double t2 = l * std::log(16.0 * max_nd / (kp1_sq * l));
    term_logs.push_back(t1);
    term_logs.push_back(t2);
    if (t1 > best) { best = t1; out.dominant_ell = ell; out.dominant_sum = 1; }
    if (t2 > best) { best = t2; out.dominant_ell = ell; out.dominant_sum = 2; }
  }
  out.excess_log = log_sum_exp(term_logs);
  // total = 1 + exp(excess_log), in log space.
  out.total_log = out.excess_log == kNegInf ? 0.0
                                            : log_sum_exp({0.0, out.excess_log});
  out.total = std::exp(out.total_log);
  return out;
}

SqHighDegBound sq_highdeg_bound(std::int64_t d, std::int64_t k, int ell, double theta,
                                MomentMethod moment_source, double c_const) {
  if (ell < 1) throw std::invalid_argument("sq_highdeg_bound: need ell >= 1");
  const int moment_half_order = ell * (ell + 1);  // exponent 2 l (l+1)

  SqHighDegBound out;
  if (moment_source == MomentMethod::ExactEnumeration) {
    out.moment_log = overlap_moment_exact(int(d), int(k), moment_half_order, true).value_log;
  } else {
    // Split chain: E<x1,x2>^(2L) <= 2^(2L) (C L)^L (1/d + L/k^2)^L + (4/(k+1)^2)^L.
    const double L = double(moment_half_order);
    const double split = 2.0 * L * std::log(2.0) +
                         moment_bound_b4(d, k, moment_half_order, c_const);
    const double pinned = L * std::log(4.0 / ((double(k) + 1.0) * (double(k) + 1.0)));
    out.moment_log = log_sum_exp({split, pinned});
  }

  const double l = double(ell);
  const double factor = std::abs(1.0 - 4.0 * theta * theta);
  const double prefactor_log =
      factor == 0.0 ? kNegInf : 2.0 * l * l * (std::log(l) + std::log(factor));
  out.rhs_log = prefactor_log == kNegInf ? kNegInf : prefactor_log + out.moment_log;
  out.target_log = -(l * l / 3.0) * std::log(double(k));
  out.passes = out.rhs_log <= out.target_log;
  return out;
}

SqCertificate sda_certificate(std::int64_t d, std::int64_t k, std::int64_t n,
                              double delta_exp, double eps_measured, double gamma_hd_log) {
  (void)d;
  if (!(delta_exp > 0.0) || delta_exp > 0.1)
    throw std::invalid_argument("sda_certificate: need delta in (0, 0.1]");
  if (eps_measured < 0.0)
    throw std::invalid_argument("sda_certificate: need eps >= 0");

  SqCertificate cert;
  const double k_delta = std::pow(double(k), delta_exp);
  cert.ell = int(std::ceil(k_delta));
  cert.log2_q = double(cert.ell);  // q = 2^ell, so q^(2/ell) = 4 exactly
  cert.eps = eps_measured;
  cert.gamma_hd_log = gamma_hd_log;

  const double l = double(cert.ell);
  const double log_n = std::log(double(n));
  // inner = l eps^(2/l) + gamma^(2/l) n, in log space.
  std::vector<double> inner;
  if (eps_measured > 0.0) inner.push_back(std::log(l) + (2.0 / l) * std::log(eps_measured));
  if (gamma_hd_log != kNegInf) inner.push_back((2.0 / l) * gamma_hd_log + log_n);
  const double inner_log = log_sum_exp(inner);

  cert.threshold_log = log_n - std::log(100.0) - delta_exp * std::log(double(k));
  if (inner_log == kNegInf) {
    cert.degenerate = true;
    cert.sda_arg_log = std::numeric_limits<double>::infinity();
    cert.passes = true;
    return cert;
  }
  cert.sda_arg_log = log_n - std::log(4.0) - inner_log;
  cert.passes = cert.sda_arg_log >= cert.threshold_log;
  return cert;
}

}  // namespace slrgap
