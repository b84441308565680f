#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "slrgap/ldlr.hpp"
#include "slrgap/model.hpp"

using namespace slrgap;

namespace {

// Independent brute-force moment: enumerate BOTH spikes (no canonical-form
// shortcut), over the pinned prior with d ambient coordinates.
double brute_force_moment(int d, int k, int ell, bool include_first) {
  std::vector<std::vector<int>> supports;
  std::vector<int> comb(k);
  for (int i = 0; i < k; ++i) comb[i] = i;
  while (true) {
    supports.push_back(comb);
    int i = k - 1;
    while (i >= 0 && comb[i] == d - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  const double mag = 1.0 / std::sqrt(double(k + 1));
  long double total = 0.0L, count = 0.0L;
  for (const auto& s1 : supports) {
    for (std::uint32_t b1 = 0; b1 < (1u << k); ++b1) {
      std::vector<double> v1(d, 0.0);
      for (int i = 0; i < k; ++i) v1[s1[i]] = ((b1 >> i) & 1) ? mag : -mag;
      for (const auto& s2 : supports) {
        for (std::uint32_t b2 = 0; b2 < (1u << k); ++b2) {
          // pinned product (-mag)(-mag) = 1/(k+1)
          double dot = include_first ? mag * mag : 0.0;
          for (int i = 0; i < k; ++i) {
            double x2 = ((b2 >> i) & 1) ? mag : -mag;
            dot += v1[s2[i]] * x2;
          }
          long double term = 1.0L;
          for (int e = 0; e < 2 * ell; ++e) term *= dot;
          total += term;
          count += 1.0L;
        }
      }
    }
  }
  return double(total / count);
}

// Exact moment of the overlap count |S1 cap S2| (hypergeometric) raised to ell.
double hypergeometric_moment(int d, int k, int ell) {
  auto binom = [](int n, int r) -> double {
    if (r < 0 || r > n) return 0.0;
    double c = 1;
    for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
    return c;
  };
  double total = 0.0;
  for (int j = 0; j <= k; ++j) {
    double prob = binom(k, j) * binom(d - k, k - j) / binom(d, k);
    total += prob * std::pow(double(j), ell);
  }
  return total;
}

}  // namespace

TEST_SUITE("ldlr") {

TEST_CASE("exact moments: d=2, k=1 reference values") {
  CHECK(overlap_moment_exact(2, 1, 1, false).value == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(overlap_moment_exact(2, 1, 1, true).value == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("exact moments: full support, ell=1 equals k/(k+1)^2") {
  for (int k : {1, 2, 3, 4}) {
    MomentEstimate m = overlap_moment_exact(k, k, 1, false);
    CHECK(m.value == doctest::Approx(k / double((k + 1) * (k + 1))).epsilon(1e-13));
  }
}

TEST_CASE("exact matches an independent two-sided brute force") {
  for (int d : {2, 3, 4, 5}) {
    for (int k = 1; k <= std::min(d, 3); ++k) {
      for (int ell : {1, 2}) {
        for (bool inc : {false, true}) {
          double brute = brute_force_moment(d, k, ell, inc);
          double fast = overlap_moment_exact(d, k, ell, inc).value;
          CHECK(fast == doctest::Approx(brute).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("ell=0 moment is exactly 1") {
  CHECK(overlap_moment_exact(5, 2, 0, false).value == 1.0);
  RngStream rng(61);
  CHECK(overlap_moment_mc(5, 2, 0, false, 1000, rng).value == 1.0);
}

TEST_CASE("enumeration budget refusal names the fallback") {
  CHECK_THROWS_WITH_AS(overlap_moment_exact(60, 12, 1, false, 1000000),
                       doctest::Contains("overlap_moment_mc"), std::invalid_argument);
}

TEST_CASE("monte carlo agrees with exact within 4 stderr") {
  RngStream rng(62);
  MomentEstimate exact = overlap_moment_exact(6, 2, 2, false);
  MomentEstimate mc = overlap_moment_mc(6, 2, 2, false, 200000, rng);
  CHECK(std::abs(mc.value - exact.value) <= 4.0 * mc.stderr_lin);
  CHECK(mc.stderr_lin > 0.0);
}

TEST_CASE("monte carlo stderr shrinks like 1/sqrt(trials)") {
  RngStream rng(63);
  MomentEstimate a = overlap_moment_mc(8, 2, 1, false, 100000, rng);
  MomentEstimate b = overlap_moment_mc(8, 2, 1, false, 400000, rng);
  CHECK(a.stderr_lin / b.stderr_lin == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("moment monotonicity in ell") {
  for (int d : {4, 6, 10}) {
    for (int k = 1; k <= 3; ++k) {
      double prev = std::numeric_limits<double>::infinity();
      for (int ell = 1; ell <= 4; ++ell) {
        double m = overlap_moment_exact(d, k, ell, false).value;
        CHECK(m <= prev + 1e-15);
        prev = m;
      }
    }
  }
}

TEST_CASE("split inequality on the enumeration grid") {
  // E<x,x>^{2l} (incl) <= 2^{2l} E<x_{\1},x_{\1}>^{2l} (excl) + (4/(k+1)^2)^l
  for (int d : {3, 5, 8}) {
    for (int k = 1; k <= 3; ++k) {
      if (k > d) continue;
      for (int ell = 1; ell <= 3; ++ell) {
        double incl = overlap_moment_exact(d, k, ell, true).value;
        double excl = overlap_moment_exact(d, k, ell, false).value;
        double rhs = std::pow(2.0, 2 * ell) * excl +
                     std::pow(4.0 / ((k + 1.0) * (k + 1.0)), ell);
        CHECK(incl <= rhs * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("lemma-bound values and domination") {
  // direct arithmetic
  CHECK(moment_bound_b4(100, 10, 2, 1.0) == doctest::Approx(std::log(0.0036)).epsilon(1e-12));
  CHECK(moment_bound_b4(50, 5, 1, 1.0) ==
        doctest::Approx(std::log(1.0 / 50 + 1.0 / 25)).epsilon(1e-12));

  // spec-scale domination with a generous constant
  for (int ell : {1, 2, 3}) {
    double exact_log = overlap_moment_exact(8, 2, ell, false).value_log;
    CHECK(exact_log <= moment_bound_b4(8, 2, ell, 8.0));
  }
}

TEST_CASE("fitted constant dominates the whole grid") {
  double max_needed = 0.0;
  for (int d : {3, 4, 6, 8, 10}) {
    for (int k = 1; k <= std::min(3, d); ++k) {
      for (int ell = 1; ell <= 4; ++ell) {
        double m = overlap_moment_exact(d, k, ell, false).value;
        // minimal C at this point: C = m^{1/l} / (l (1/d + l/k^2))
        double c = std::pow(m, 1.0 / ell) /
                   (ell * (1.0 / d + double(ell) / (double(k) * k)));
        max_needed = std::max(max_needed, c);
        CHECK(overlap_moment_exact(d, k, ell, false).value_log <=
              moment_bound_b4(d, k, ell, kMomentBoundC) + 1e-12);
      }
    }
  }
  // the frozen constant is the minimal feasible one rounded up to one decimal
  CHECK(max_needed <= kMomentBoundC);
  CHECK(kMomentBoundC - max_needed < 0.1);
  MESSAGE("fitted minimal C over grid: ", max_needed);
}

TEST_CASE("binomial moments") {
  // ell=1: E[B] = k^2/d
  for (int k : {1, 2, 5}) {
    BinomialMoment b = binomial_moment(k, 4 * k, 1);
    CHECK(std::exp(b.exact_log) == doctest::Approx(double(k) * k / (4.0 * k)).epsilon(1e-12));
    CHECK(b.bound_log == doctest::Approx(std::log(double(k) * k / (4.0 * k) + 0.5)));
  }
  // k=2, d=4, ell=2: E[B^2] = 1.5, bound 4
  BinomialMoment b = binomial_moment(2, 4, 2);
  CHECK(std::exp(b.exact_log) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::exp(b.bound_log) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("hypergeometric overlap is dominated by the binomial moment") {
  for (int d = 2; d <= 8; ++d) {
    for (int k = 1; k <= std::min(3, d); ++k) {
      for (int ell = 1; ell <= 3; ++ell) {
        BinomialMoment b = binomial_moment(k, d, ell);
        double hyper = hypergeometric_moment(d, k, ell);
        if (hyper > 0.0)
          CHECK(std::log(hyper) <= b.exact_log + 1e-12);
      }
    }
  }
}

TEST_CASE("norm bound: empty sums give exactly 1") {
  for (int D : {0, 1}) {
    LdlrParams p;
    p.d = 1000;
    p.k = 10;
    p.n = 100;
    p.D = D;
    LdlrNormBound b = ldlr_norm_bound(p, MomentMethod::LemmaBound);
    CHECK(b.total == 1.0);
    CHECK(b.total_log == 0.0);
    CHECK(std::isinf(b.excess_log));
  }
}

TEST_CASE("norm bound: D=2 closed form with exact moments") {
  LdlrParams p;
  p.d = 8;
  p.k = 2;
  p.n = 50;
  p.D = 2;
  LdlrNormBound b = ldlr_norm_bound(p, MomentMethod::ExactEnumeration);
  double m1 = overlap_moment_exact(8, 2, 1, false).value;
  double want = 1.0 + 16.0 * 50 * m1 + 16.0 * 50 / 9.0;
  CHECK(b.total == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("norm bound is monotone in n and D") {
  LdlrParams p;
  p.d = 1000000;
  p.k = 100;
  p.n = 1000;
  p.D = 6;
  double prev = ldlr_norm_bound(p, MomentMethod::LemmaBound).total_log;
  for (std::int64_t n : {2000, 4000, 8000}) {
    p.n = n;
    double cur = ldlr_norm_bound(p, MomentMethod::LemmaBound).total_log;
    CHECK(cur >= prev);
    prev = cur;
  }
  p.n = 1000;
  prev = ldlr_norm_bound(p, MomentMethod::LemmaBound).total_log;
  for (int D : {8, 10, 12}) {
    p.D = D;
    double cur = ldlr_norm_bound(p, MomentMethod::LemmaBound).total_log;
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("high-degree bound: theta=1/2 collapses the prefactor") {
  SqHighDegBound b = sq_highdeg_bound(1000, 10, 1, 0.5, MomentMethod::LemmaBound);
  CHECK(std::isinf(b.rhs_log));
  CHECK(b.rhs_log < 0);
  CHECK(b.passes);
}

TEST_CASE("high-degree bound is monotone in the moment") {
  // holding prefactors fixed, a smaller moment gives a smaller RHS
  SqHighDegBound big = sq_highdeg_bound(100, 10, 2, 0.9, MomentMethod::LemmaBound, 2.0);
  SqHighDegBound small = sq_highdeg_bound(100, 10, 2, 0.9, MomentMethod::LemmaBound, 0.5);
  CHECK(small.rhs_log <= big.rhs_log);
  CHECK(small.target_log == big.target_log);
}

TEST_CASE("sda certificate algebra") {
  // q = 2^l means q^{2/l} = 4: with gamma = -inf and eps > 0 the argument is
  // n / (4 l eps^{2/l}) exactly.
  const double eps = 0.1;
  SqCertificate c = sda_certificate(1000, 100, 5000, 0.1,
                                    eps, -std::numeric_limits<double>::infinity());
  const double l = c.ell;
  double want = std::log(5000.0) - std::log(4.0) -
                (std::log(l) + (2.0 / l) * std::log(eps));
  CHECK(c.sda_arg_log == doctest::Approx(want).epsilon(1e-12));
  CHECK(c.log2_q == doctest::Approx(double(c.ell)));

  // degenerate limit: eps = 0, gamma = 0 -> +inf, trivially passes
  SqCertificate deg = sda_certificate(1000, 100, 5000, 0.1, 0.0,
                                      -std::numeric_limits<double>::infinity());
  CHECK(deg.degenerate);
  CHECK(deg.passes);
}

TEST_CASE("parameter guards") {
  CHECK_THROWS_AS(overlap_moment_exact(3, 0, 1, false), std::invalid_argument);
  RngStream rng(64);
  CHECK_THROWS_AS(overlap_moment_mc(5, 2, 1, false, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(moment_bound_b4(5, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(binomial_moment(101, 200, 1), std::invalid_argument);
  CHECK_THROWS_AS(sda_certificate(10, 10, 10, 0.5, 0.1, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
