#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kdeais/math.hpp"
#include "kdeais/rng.hpp"

using namespace kdeais;

TEST_CASE("norm_cdf matches erf identities") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.0) == doctest::Approx(0.841344746068542949).epsilon(1e-12));
  CHECK(norm_sf(1.0) == doctest::Approx(1.0 - 0.841344746068542949).epsilon(1e-12));
  // Deep tail stays accurate in the survival form.
  CHECK(norm_sf(8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
}

TEST_CASE("norm_ppf inverts norm_cdf to near machine precision") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
    const double x = norm_ppf(p);
    CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(norm_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::isinf(norm_ppf(0.0)));
  CHECK(std::isinf(norm_ppf(1.0)));
  CHECK_THROWS_AS(norm_ppf(-0.1), std::invalid_argument);
}

TEST_CASE("log_sum_exp handles extremes") {
  std::vector<double> v{-1000.0, -1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-12));
  std::vector<double> w{kNegInf, 0.0};
  CHECK(log_sum_exp(w) == doctest::Approx(0.0));
  std::vector<double> allneg{kNegInf, kNegInf};
  CHECK(log_sum_exp(allneg) == kNegInf);
  CHECK(log_add(kNegInf, -3.0) == doctest::Approx(-3.0));
}

TEST_CASE("mean_var and median") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto mv = mean_var(v);
  CHECK(mv.mean == doctest::Approx(2.5));
  CHECK(mv.var == doctest::Approx(5.0 / 3.0));
  CHECK(median(v) == doctest::Approx(2.5));
  std::vector<double> odd{5.0, 1.0, 3.0};
  CHECK(median(odd) == doctest::Approx(3.0));
}

TEST_CASE("rng substreams are stable and independent of sibling consumers") {
  RngForker f(42);
  const auto a1 = f.derive("pilot");
  const auto a2 = f.derive("pilot");
  CHECK(a1 == a2);
  CHECK(f.derive("pilot") != f.derive("batch"));
  CHECK(f.derive("batch", 1) != f.derive("batch", 2));
  RngForker g(43);
  CHECK(f.derive("pilot") != g.derive("pilot"));
}

TEST_CASE("chi2 quantile approximation is sane") {
  // Reference: chi2(0.99, 50) = 76.1539.
  CHECK(chi2_upper_quantile(50, 0.01) == doctest::Approx(76.1539).epsilon(0.01));
}
