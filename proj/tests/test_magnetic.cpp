#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "hch/magnetic.hpp"

using namespace hch;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec small_grid() { return GridSpec::uniform(1, 32, 6.5, 32, 8.0); }

Field packet(const GridSpec& g) { return make_packet({HPoint::identity(1), {1.0, 1.0, 1.2}, {}}, g); }

cplx heat(double alpha, double t, double x, double y, double xp, double yp) {
  const std::vector<double> z{x, y}, zp{xp, yp};
  return mehler_heat_kernel({alpha, t, Flavor::Heat}, z, zp);
}

// Trapezoid over a square of half-width `half` with spacing h.
template <class F>
cplx planar_sum(double half, double h, F&& f) {
  const int n = static_cast<int>(std::lround(2 * half / h));
  cplx acc{0.0, 0.0};
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) acc += f(-half + i * h, -half + j * h);
  }
  return acc * h * h;
}

// Roll the center axis by k nodes.
Field shift_center(const Field& f, int k) {
  Field out(f.grid, f.repr);
  const int ns = f.grid.center().n;
  for (std::size_t zf = 0; zf < f.grid.slice_size(); ++zf) {
    for (int m = 0; m < ns; ++m) out.at(zf, (m + k + ns) % ns) = f.at(zf, m);
  }
  return out;
}

}  // namespace

TEST_SUITE("magnetic") {

TEST_CASE("zero field reduces to the free kernels") {
  const double t = 0.7;
  const double r2 = 0.3 * 0.3 + 1.1 * 1.1;
  const cplx k = heat(0.0, t, 0.1, -0.5, 0.4, 0.6);
  CHECK(k.real() == doctest::Approx(std::exp(-r2 / (2 * t)) / (2 * kPi * t)).epsilon(1e-14));
  CHECK(k.imag() == 0.0);
  const std::vector<double> z{0.1, -0.5}, zp{0.4, 0.6};
  const cplx ks = mehler_schrodinger_kernel({0.0, t, Flavor::Schrodinger}, z, zp);
  const cplx free = std::exp(cplx{0.0, r2 / (2 * t)}) / cplx{0.0, 2 * kPi * t};
  CHECK(std::abs(ks - free) < 1e-14);
  // Small alpha approaches the free kernel continuously.
  CHECK(std::abs(heat(1e-6, t, 0.1, -0.5, 0.4, 0.6) - k) < 1e-6);
}

TEST_CASE("heat kernel acts on plane waves by the twisted symbol") {
  // int K(z, z') e^{i eta.z'} dz' = e^{i eta.z} sech(alpha t) exp(-tanh(alpha t) |eta + alpha ztilde|^2 / (2 alpha)).
  const double alpha = 0.6, t = 0.5;
  const double x = 0.4, y = -0.3;
  for (const auto& eta : {std::array<double, 2>{0.0, 0.0}, std::array<double, 2>{0.7, -0.2}}) {
    const cplx lhs = planar_sum(12.0, 0.05, [&](double xp, double yp) {
      return heat(alpha, t, x, y, xp, yp) * std::polar(1.0, eta[0] * xp + eta[1] * yp);
    });
    const double ux = eta[0] + alpha * y, uy = eta[1] - alpha * x;
    const cplx rhs = std::polar(1.0, eta[0] * x + eta[1] * y) / std::cosh(alpha * t) *
                     std::exp(-std::tanh(alpha * t) * (ux * ux + uy * uy) / (2 * alpha));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("heat kernel satisfies Chapman-Kolmogorov") {
  const double alpha = 0.7, t = 0.3, s = 0.5;
  const double x = 0.2, y = -0.4, xp = -0.5, yp = 0.3;
  const cplx lhs = planar_sum(12.0, 0.05, [&](double wx, double wy) {
    return heat(alpha, t, x, y, wx, wy) * heat(alpha, s, wx, wy, xp, yp);
  });
  const cplx rhs = heat(alpha, t + s, x, y, xp, yp);
  CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-6);
}

TEST_CASE("zero-field slice carries unit mass") {
  const double t = 0.4;
  const cplx mass = planar_sum(12.0, 0.05, [&](double xp, double yp) { return heat(0.0, t, 0.3, 0.1, xp, yp); });
  CHECK(std::abs(mass - 1.0) < 1e-6);
  // The total integral over H^1 is the alpha = 0 mode and is conserved by the flow.
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const Field out = oracle_evolve(f, 0.5, Flavor::Heat);
  cplx before{0.0, 0.0}, after{0.0, 0.0};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    before += f.values[i];
    after += out.values[i];
  }
  CHECK(std::abs(after - before) / std::abs(before) < 1e-6);
}

TEST_CASE("heat kernel is Hermitian and real-positive on the diagonal") {
  const double alpha = -0.9, t = 0.8;
  CHECK(std::abs(std::conj(heat(alpha, t, 0.3, 0.7, -0.2, 0.5)) - heat(alpha, t, -0.2, 0.5, 0.3, 0.7)) < 1e-15);
  const cplx diag = heat(alpha, t, 0.4, -0.1, 0.4, -0.1);
  CHECK(diag.imag() == doctest::Approx(0.0));
  CHECK(diag.real() > 0.0);
}

TEST_CASE("heat oracle contracts, preserves positivity, and matches t -> 0") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const Field out = oracle_evolve(f, 0.5, Flavor::Heat);
  CHECK(l2_norm(out) <= l2_norm(f) * (1.0 + 1e-6));
  const double top = sup_norm_sampled(out);
  for (const auto& v : out.values) {
    CHECK(std::abs(v.imag()) < 1e-10 * top);
    CHECK(v.real() > -1e-10 * top);
  }
}

TEST_CASE("heat oracle leaves data at rate O(t)") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  CHECK(oracle_evolve(f, 0.0, Flavor::Heat).values == f.values);
  const double d1 = l2_distance(oracle_evolve(f, 0.2, Flavor::Heat), f);
  const double d2 = l2_distance(oracle_evolve(f, 0.1, Flavor::Heat), f);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("Schrodinger oracle is unitary and a group") {
  const GridSpec g = GridSpec::uniform(1, 64, 8.0, 32, 16.0);
  const Field f = make_packet({HPoint::identity(1), {1.0, 1.0, 2.0}, {}}, g);
  const Field a = oracle_evolve(f, 0.45, Flavor::Schrodinger);
  CHECK(std::abs(l2_norm(a) - l2_norm(f)) < 1e-6);
  const Field b = oracle_evolve(a, 0.45, Flavor::Schrodinger);
  const Field c = oracle_evolve(f, 0.9, Flavor::Schrodinger);
  CHECK(std::abs(l2_norm(c) - l2_norm(f)) < 1e-6);
  CHECK(relative_l2_error(b, c) < 1e-5);
  // Slices that cannot be resolved on this grid are refused rather than aliased.
  CHECK_THROWS_AS(oracle_evolve(f, 1.2, Flavor::Schrodinger), NumericalAbort);
}

TEST_CASE("both flavors commute with center translation") {
  const GridSpec g = small_grid();
  const Field f = make_packet({HPoint({-0.3, 0.0}, 0.0), {1.0, 1.0, 1.2}, {0.0, 0.5, 0.0}}, g);
  for (Flavor fl : {Flavor::Heat, Flavor::Schrodinger}) {
    const Field a = shift_center(oracle_evolve(f, 0.2, fl), 3);
    const Field b = oracle_evolve(shift_center(f, 3), 0.2, fl);
    CHECK(relative_l2_error(a, b) < 1e-12);
  }
}

TEST_CASE("point evaluation agrees with the gridded oracle") {
  const GridSpec g = small_grid();
  const Field f = packet(g);
  const Field out = oracle_evolve(f, 0.3, Flavor::Heat);
  const HPoint p({0.40625, -0.8125}, 1.0);  // a grid node
  const std::size_t zf = 17 * 32 + 14;
  CHECK(std::abs(oracle_evaluate_point(f, p, 0.3, Flavor::Heat) - out.at(zf, 18)) < 1e-12);
}

TEST_CASE("caustics are rejected") {
  const std::vector<double> z{0.0, 0.0}, zp{1.0, 0.0};
  CHECK_THROWS_AS(mehler_schrodinger_kernel({1.0, kPi, Flavor::Schrodinger}, z, zp), CausticError);
  CHECK(caustic_distance(1.0, 0.5) == 1.0);
  CHECK(caustic_distance(1.0, kPi) < 1e-12);
  const GridSpec g = small_grid();  // alpha nodes are multiples of pi / 8 here
  const Field f = packet(g);
  try {
    oracle_evolve(f, 8.0, Flavor::Schrodinger);
    FAIL("expected a caustic rejection");
  } catch (const CausticError& e) {
    CHECK(!e.offending_alpha.empty());
    CHECK(std::string(e.what()).find("caustic") != std::string::npos);
  }
  const Field planar2(GridSpec::uniform(2, 8, 6.0, 8, 8.0), Repr::Physical);
  CHECK_THROWS_AS(oracle_evolve(planar2, 0.1, Flavor::Heat), DimensionError);
}

TEST_CASE("kernel table export") {
  const std::vector<double> alphas{0.0, 0.5};
  const std::vector<std::vector<double>> z{{0.0, 0.0}, {1.0, 0.5}}, zp{{0.5, 0.5}, {-1.0, 0.0}};
  const auto rows = kernel_table(Flavor::Heat, alphas, 0.5, z, zp);
  REQUIRE(rows.size() == 4u);
  CHECK(rows[3].value == heat(0.5, 0.5, 1.0, 0.5, -1.0, 0.0));
  const auto path = (std::filesystem::temp_directory_path() / "hch_kernel_test.csv").string();
  write_kernel_csv(rows, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "alpha,t,x,y,xp,yp,re_k,im_k");
  std::filesystem::remove(path);
}

}  // TEST_SUITE
