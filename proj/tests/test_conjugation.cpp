#include <doctest.h>

#include "gevlab/conjugation.hpp"
#include "gevlab/gs_spaces.hpp"

using namespace gevlab;

namespace {

const cplx I(0, 1);

CoefficientSpec drift(double sigma, const Grid& g, double b_const = 0) {
  auto a = [sigma](double, double x, int k) -> cplx {
    const double r = 1 + x * x;
    if (k == 0) return {0, std::pow(r, -sigma / 2)};
    if (k == 1) return {0, -sigma * x * std::pow(r, -sigma / 2 - 1)};
    return {0, -sigma * std::pow(r, -sigma / 2 - 1) + sigma * (sigma + 2) * x * x * std::pow(r, -sigma / 2 - 2)};
  };
  return make_coefficient_spec(a, [b_const](double, double x) { return cplx(b_const * std::cos(x), 0); }, 2.0,
                               sigma, 1.0, 1.0, g);
}

CoefficientSpec zero_drift(const Grid& g) {
  return make_coefficient_spec([](double, double, int) { return cplx(0); }, [](double, double) { return cplx(0); },
                               2.0, 0.5, 1.0, 1.0, g);
}

}  // namespace

TEST_CASE("weight derivatives agree with central differences") {
  const double e = 1e-5;
  for (double s : {1.0, 2.0, 4.0})
    for (double x : {-7.0, -0.5, 0.0, 1.3, 20.0}) {
      const double w0m = bracket_weight_derivatives(x - e, s, 0), w0p = bracket_weight_derivatives(x + e, s, 0);
      CHECK(bracket_weight_derivatives(x, s, 0) == doctest::Approx(bracket_power(x, 1 / s)).epsilon(1e-15));
      CHECK(std::abs((w0p - w0m) / (2 * e) - bracket_weight_derivatives(x, s, 1)) <= 1e-8);
      const double w1m = bracket_weight_derivatives(x - e, s, 1), w1p = bracket_weight_derivatives(x + e, s, 1);
      CHECK(std::abs((w1p - w1m) / (2 * e) - bracket_weight_derivatives(x, s, 2)) <= 1e-8);
    }
  CHECK_THROWS_AS(bracket_weight_derivatives(1, 0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(bracket_weight_derivatives(1, 2, 3), InvalidArgument);
}

TEST_CASE("conjugated coefficients match the product rule") {
  // e^{dw}(d2 + aD + b)e^{-dw}: a - 2i d w', b - d w'' + d^2 w'^2 + i d a w'.
  const Grid g(256, 30);
  const CoefficientSpec spec = drift(0.5, g, 0.7);
  const double delta = 0.3, s = 2, e = 1e-4;
  const ConjugatedCoefficients cc = conjugate_coefficients(spec, delta, s, 0, g);
  for (Index i = 0; i < g.size(); i += 7) {
    const double x = g.x(i);
    auto w = [&](double y) { return bracket_power(y, 1 / s); };
    const double w1 = (w(x + e) - w(x - e)) / (2 * e);
    const double w2 = (w(x + e) - 2 * w(x) + w(x - e)) / (e * e);
    const cplx a = spec.a(0, x, 0);
    CHECK(std::abs(cc.a_delta.values[i] - (a - 2.0 * I * delta * w1)) <= 1e-8);
    const cplx b = spec.b(0, x) - delta * w2 + delta * delta * w1 * w1 + I * delta * a * w1;
    CHECK(std::abs(cc.b_delta.values[i] - b) <= 1e-6);
    // The shift of a is purely imaginary.
    CHECK(std::abs((cc.a_delta.values[i] - a).real()) <= 1e-12 * std::abs(a));
  }
  const ConjugatedCoefficients c0 = conjugate_coefficients(spec, 0, s, 0, g);
  for (Index i = 0; i < g.size(); ++i) {
    CHECK(c0.a_delta.values[i] == spec.a(0, g.x(i), 0));
    CHECK(c0.b_delta.values[i] == spec.b(0, g.x(i)));
  }
  CHECK_THROWS_AS(conjugate_coefficients(spec, -0.1, s, 0, g), InvalidArgument);
  CHECK_THROWS_AS(conjugate_coefficients(spec, 0.1, 0.9, 0, g), InvalidArgument);
}

TEST_CASE("imaginary part decay: symbolic cases") {
  const Grid g(2048, 200);
  {
    // a = 0, s = 1: Im a_delta -> -2 delta, no decay, bound min(sigma, 0) = 0.
    const ImagDecayFit f = verify_imag_decay(conjugate_coefficients(zero_drift(g), 0.1, 1, 0, g), 0.5);
    CHECK(f.bound_q == 0);
    CHECK(std::abs(f.fitted_q) <= 0.02);
    CHECK(f.bound_holds);
  }
  {
    // a = 0, s = 2: Im a_delta = -delta x <x>^{-3/2} ~ <x>^{-1/2}.
    const ImagDecayFit f = verify_imag_decay(conjugate_coefficients(zero_drift(g), 0.1, 2, 0, g), 0.5);
    CHECK(f.fitted_q == doctest::Approx(0.5).epsilon(0.04));
    CHECK(f.bound_holds);
  }
  {
    const ImagDecayFit f = verify_imag_decay(conjugate_coefficients(drift(0.25, g), 0.1, 2, 0, g), 0.25);
    CHECK(f.bound_q == 0.25);
    CHECK(f.fitted_q >= 0.2);
    CHECK(f.bound_holds);
  }
  {
    const ImagDecayFit f = verify_imag_decay(conjugate_coefficients(zero_drift(g), 0, 2, 0, g), 0.5);
    CHECK(f.vacuous);
  }
  CHECK_THROWS_AS(verify_imag_decay(conjugate_coefficients(zero_drift(Grid(32, 200)), 0.1, 2, 0, Grid(32, 200)), 0.5),
                  InvalidArgument);
}

TEST_CASE("coefficient spec validation") {
  const Grid g(64, 10);
  auto a = [](double, double, int) { return cplx(0, 2); };
  auto b = [](double, double) { return cplx(0); };
  CHECK_THROWS_AS(make_coefficient_spec(a, b, 2, 0.5, 1, 1, g), InvalidArgument);
  CHECK_NOTHROW(make_coefficient_spec(a, b, 2, 0.5, 7, 1, g));
  CHECK_THROWS_AS(make_coefficient_spec(a, b, 1, 0.5, 100, 1, g), InvalidArgument);
  CHECK_THROWS_AS(make_coefficient_spec(a, b, 2, 1.0, 100, 1, g), InvalidArgument);
  CHECK_THROWS_AS(make_coefficient_spec(a, b, 2, 0.5, 0, 1, g), InvalidArgument);
  CHECK_THROWS_AS(make_coefficient_spec(nullptr, b, 2, 0.5, 100, 1, g), InvalidArgument);
}

TEST_CASE("conjugation residual") {
  const Grid g(2048, 40);
  const CoefficientSpec spec = drift(0.5, g, 0.3);
  CHECK(conjugation_residual(spec, 0.2, 2, Field(g), 0) == 0);
  const Field gauss = sample(g, [](double x) { return cplx(std::exp(-x * x / 2), 0); });
  CHECK(conjugation_residual(spec, 0.2, 2, gauss, 0) <= 1e-8);
  // Spectral derivatives leave only a roundoff floor for every delta.
  for (double delta : {0.02, 0.2, 0.5}) CHECK(conjugation_residual(spec, delta, 2, gauss, 0) <= 1e-11);
  // With s = 1 the weight reaches e^{delta L}, which lifts the roundoff of the
  // spectral derivatives near the boundary.
  const Field shifted = sample(g, [](double x) { return std::exp(-(x - 5) * (x - 5) / 4) * std::polar(1.0, 2 * x); });
  CHECK(conjugation_residual(spec, 0.3, 2, shifted, 0) <= 1e-11);
  CHECK(conjugation_residual(spec, 0.3, 1, shifted, 0) <= 1e-8);

  const Field wide = sample(g, [](double x) { return cplx(std::exp(-x * x / 400), 0); });
  CHECK_THROWS_AS(conjugation_residual(spec, 0.2, 2, wide, 0), InvalidArgument);
  const Field rough = sample(g, [](double x) { return cplx(std::abs(x) < 1 ? 1.0 : 0.0, 0); });
  CHECK_THROWS_AS(conjugation_residual(spec, 0.2, 2, rough, 0), InvalidArgument);
}
