#include <doctest.h>

#include <cmath>

#include "hch/heat.hpp"
#include "hch/magnetic.hpp"

using namespace hch;

namespace {

GridSpec small_grid() { return GridSpec::uniform(1, 32, 6.5, 32, 8.0); }

Field packet(const GridSpec& g, double ws = 1.2) {
  return make_packet({HPoint::identity(1), {1.0, 1.0, ws}, {}}, g);
}

// L applied to exp(-(x^2 + y^2)/2 - s^2/(2 w^2)) in closed form.
Field analytic_sublaplacian(const GridSpec& g, double w, double scale) {
  Field out(g, Repr::Physical);
  std::vector<double> z(2);
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_coords(zf, z);
    const double r2 = z[0] * z[0] + z[1] * z[1];
    for (int m = 0; m < g.center().n; ++m) {
      const double s = g.center().node(m);
      const double base = std::exp(-0.5 * r2 - s * s / (2 * w * w));
      out.at(zf, m) = scale * base * ((r2 - 2.0) + r2 * (s * s / (w * w * w * w) - 1.0 / (w * w)));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("heat") {

TEST_CASE("zero step is the identity for every method") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  for (const HeatStepMethod& m : {HeatStepMethod{Quadrature{}}, HeatStepMethod{MonteCarlo{}}, HeatStepMethod{DenseSpectral{}}}) {
    const Field out = heat_step(f, 0.0, PotentialSpec::zero(), m);
    CHECK(out.values == f.values);
  }
}

TEST_CASE("dense step does not expand the norm") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  for (double tau : {1e-3, 1e-2, 0.1, 0.5}) {
    CHECK(l2_norm(heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{})) <= l2_norm(f) + 1e-8);
  }
}

TEST_CASE("quadrature and Monte Carlo steps track the dense step") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const double tau = 0.01;
  const Field dense = heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{});
  StepStats st;
  const Field quad = heat_step(f, tau, PotentialSpec::zero(), Quadrature{8}, &st);
  CHECK(relative_l2_error(quad, dense) < 2e-3);
  CHECK(l2_norm(quad) <= l2_norm(f) * (1.0 + 1e-3));
  CHECK(st.interp.evaluations > 0);
  CHECK_THROWS_AS(heat_step(f, tau, PotentialSpec::zero(), MonteCarlo{100, RngStream{}}), std::invalid_argument);
}

TEST_CASE("Monte Carlo step agrees with quadrature and is reproducible") {
  const GridSpec g = GridSpec::uniform(1, 16, 7.0, 16, 8.0);
  const Field f = make_packet({HPoint::identity(1), {1.0, 1.0, 1.0}, {}}, g);
  const double tau = 0.05;
  const Field quad = heat_step(f, tau, PotentialSpec::zero(), Quadrature{8});
  const Field mc = heat_step(f, tau, PotentialSpec::zero(), MonteCarlo{2000, RngStream{5, 1}});
  CHECK(relative_l2_error(mc, quad) < 2e-2);
  const Field mc2 = heat_step(f, tau, PotentialSpec::zero(), MonteCarlo{2000, RngStream{5, 1}});
  CHECK(mc.values == mc2.values);
  const Field mc3 = heat_step(f, tau, PotentialSpec::zero(), MonteCarlo{2000, RngStream{5, 2}});
  CHECK(mc.values != mc3.values);
}

TEST_CASE("quadrature error falls with the number of nodes") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const double tau = 0.05;
  const Field dense = heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{});
  const double e2 = relative_l2_error(heat_step(f, tau, PotentialSpec::zero(), Quadrature{2}), dense);
  const double e6 = relative_l2_error(heat_step(f, tau, PotentialSpec::zero(), Quadrature{6}), dense);
  CHECK(e6 < e2);
}

TEST_CASE("potential adds tau c psi") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const double tau = 0.02, kappa = -0.7;
  Field expect = heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{});
  Field extra = f;
  extra *= cplx{tau * kappa, 0.0};
  expect += extra;
  const Field got = heat_step(f, tau, PotentialSpec::constant(kappa), DenseSpectral{});
  CHECK(relative_l2_error(got, expect) < 1e-13);
}

TEST_CASE("potential bound is enforced") {
  const GridSpec g = small_grid();
  PotentialSpec c{[](const HPoint& p) { return p.z[0]; }, 1.0};
  CHECK_THROWS_AS(sample_potential(c, g), std::invalid_argument);
  PotentialSpec ok{[](const HPoint& p) { return std::tanh(p.z[0]); }, 1.0};
  CHECK(sample_potential(ok, g).size() == g.size());
}

TEST_CASE("sub-Laplacian matches the closed form on a Gaussian") {
  const GridSpec g = small_grid();
  const double w = 1.2;
  const Field f = packet(g, w);
  const double amp = std::abs(f.at(g.slice_size() / 2 + 16, 16));  // node (0, 0, 0)
  const Field expect = analytic_sublaplacian(g, w, amp);
  CHECK(relative_l2_error(apply_sublaplacian(f), expect) < 1e-6);
  const Field p = partial_ft(f);
  CHECK(relative_l2_error(inverse_partial_ft(apply_sublaplacian(p)), expect) < 1e-6);
}

TEST_CASE("sub-Laplacian is symmetric and nonpositive") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const Field h = make_packet({HPoint({0.0, -0.3}, 0.4), {1.0, 1.0, 1.1}, {0.3, 0.0, 0.7}}, g);
  const cplx a = inner_product(apply_sublaplacian(f), h);
  const cplx b = inner_product(f, apply_sublaplacian(h));
  CHECK(std::abs(a - b) < 1e-10);
  CHECK(inner_product(apply_sublaplacian(h), h).real() < 0.0);
}

TEST_CASE("generator residual is first order") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const PotentialSpec c{[](const HPoint& p) { return 0.5 * std::cos(p.z[0]); }, 0.5};
  double prev = generator_residual(f, 1e-2, c);
  for (double tau : {5e-3, 2.5e-3}) {
    const double r = generator_residual(f, tau, c);
    CHECK(r / prev <= 0.7);
    prev = r;
  }
}

TEST_CASE("strong continuity surrogate is monotone") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  double prev = 1e300;
  for (double tau = 0.2; tau > 1e-3; tau *= 0.5) {
    const double dist = l2_distance(heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{}), f);
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("Chernoff iteration converges to the exact kernel at first order") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const double t = 0.25;
  const Field exact = oracle_evolve(f, t, Flavor::Heat);
  EvolutionLog log;
  const double e8 = relative_l2_error(chernoff_evolve_heat(f, t, 8, PotentialSpec::zero(), DenseSpectral{}, &log), exact);
  const double e16 = relative_l2_error(chernoff_evolve_heat(f, t, 16, PotentialSpec::zero(), DenseSpectral{}), exact);
  CHECK(e16 < e8);
  CHECK(e8 / e16 == doctest::Approx(2.0).epsilon(0.15));
  REQUIRE(log.steps.size() == 8u);
  for (std::size_t k = 1; k < log.steps.size(); ++k) CHECK(log.steps[k].l2_norm <= log.steps[k - 1].l2_norm + 1e-12);
}

TEST_CASE("boundary leakage aborts the step") {
  const GridSpec g = small_grid();
  Field f(g, Repr::Physical);
  f.at(0, 3) = 1.0;
  CHECK_THROWS_AS(heat_step(f, 0.01, PotentialSpec::zero(), DenseSpectral{}), NumericalAbort);
  CHECK_THROWS_AS(heat_step(packet(g), -0.1, PotentialSpec::zero(), DenseSpectral{}), std::invalid_argument);
  CHECK_THROWS_AS(heat_step(partial_ft(packet(g)), 0.1, PotentialSpec::zero(), DenseSpectral{}), RepresentationError);
}

}  // TEST_SUITE
