#include <doctest.h>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include "gevlab/gs_spaces.hpp"

using namespace gevlab;

namespace {

Field gaussian(const Grid& g) {
  return sample(g, [](double x) { return cplx(std::exp(-x * x / 2), 0); });
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(GSParams(1.0, 2, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(GSParams(2, 0.5, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(GSParams(2, 2, -1, 0), InvalidArgument);
  CHECK_NOTHROW(GSParams(2, 1, 0, 0));
}

TEST_CASE("zero weights reduce to the L2 norm") {
  const Grid g(512, 20);
  const Field u = gaussian(g);
  CHECK(gs_sobolev_norm(u, GSParams(2, 2, 0, 0)) == doctest::Approx(l2_norm(u)).epsilon(1e-15));
  CHECK(l2_norm(u) == doctest::Approx(std::pow(std::numbers::pi, 0.25)).epsilon(1e-12));
}

TEST_CASE("weighted norms of a Gaussian agree with quadrature") {
  const Grid g(2048, 40);
  const Field u = gaussian(g);
  boost::math::quadrature::sinh_sinh<double> q;
  for (double theta : {1.5, 2.0, 4.0}) {
    const double rho = 0.8;
    const double ref = std::sqrt(
        q.integrate([&](double xi) { return std::exp(-xi * xi + 2 * rho * bracket_power(xi, 1 / theta)); }));
    CHECK(gs_sobolev_norm(u, GSParams(theta, 2, rho, 0)) == doctest::Approx(ref).epsilon(1e-10));
  }
  for (double s : {1.0, 2.0, 3.0}) {
    const double rho = 1.1;
    const double ref =
        std::sqrt(q.integrate([&](double x) { return std::exp(-x * x + 2 * rho * bracket_power(x, 1 / s)); }));
    CHECK(gs_sobolev_norm(u, GSParams(2, s, 0, rho)) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("weights are monotone in rho") {
  const Grid g(1024, 30);
  const Field u = gaussian(g);
  double prev = 0;
  for (double rho : {0.0, 0.5, 1.0, 2.0}) {
    const double n = gs_sobolev_norm(u, GSParams(2, 2, rho, rho));
    CHECK(n > prev);
    prev = n;
  }
}

TEST_CASE("exponent overflow is reported") {
  const Grid g(256, 20);
  const Field u = gaussian(g);
  CHECK_THROWS_AS(gs_sobolev_norm(u, GSParams(2, 1, 0, 800)), NumericalError);
  CHECK_THROWS_AS(gs_sobolev_norm(u, GSParams(1.01, 1, 800, 0)), NumericalError);
  CHECK_THROWS_AS(gs_sobolev_norm(u, GSParams(2, 1, 0, 10), 5.0), NumericalError);
}

TEST_CASE("decay fit recovers a stretched exponential profile") {
  const Grid g(4096, 100);
  const Field u = sample(g, [](double x) { return cplx(3 * std::exp(-2 * std::sqrt(std::abs(x))), 0); });
  const DecayFit f = fit_decay_exponent(u, 10, 50);
  CHECK(f.inverse_order == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(f.rate == doctest::Approx(2).epsilon(1e-4));
  CHECK(f.amplitude == doctest::Approx(3).epsilon(1e-4));
  CHECK_THROWS_AS(fit_decay_exponent(u, 10, 90), InvalidArgument);
  CHECK_THROWS_AS(fit_decay_exponent(u, 0, 50), InvalidArgument);
  CHECK_THROWS_AS(fit_decay_exponent(u, 10, 10.01), InvalidArgument);
}

TEST_CASE("Gevrey order estimate of a field with known spectrum") {
  const Grid g(8192, 20);
  const Spectrum s = sample_spectrum(g, [](double xi) { return cplx(std::exp(-2 * bracket_power(xi, 0.5)), 0); });
  const Field u = inverse_transform(s);
  CHECK(estimate_gevrey_order(u) == doctest::Approx(2).epsilon(0.025));
  CHECK_THROWS_AS(estimate_gevrey_order(Field(g)), InvalidArgument);
  const Field rough = sample(g, [](double x) { return cplx(std::abs(x) < 1 ? 1.0 : 0.0, 0); });
  CHECK_THROWS_AS(estimate_gevrey_order(rough), NumericalError);
}
