#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "hch/field.hpp"

using namespace hch;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const GridSpec& g, Repr r, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  Field f(g, r);
  for (auto& v : f.values) v = {n(gen), n(gen)};
  return f;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

GaussianPacketSpec centered_packet(int d) {
  GaussianPacketSpec p;
  p.center = HPoint::identity(d);
  p.widths.assign(2 * static_cast<std::size_t>(d), 1.0);
  p.widths.push_back(2.0);
  return p;
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec::uniform(1, 12, 4.0, 8, 4.0), DimensionError);
  CHECK_THROWS_AS(GridSpec::uniform(1, 16, 4.0, 2, 4.0), DimensionError);
  CHECK_THROWS_AS(GridSpec::uniform(1, 16, 4.0, 7, 4.0), DimensionError);
  CHECK_THROWS_AS(GridSpec::uniform(1, 16, -1.0, 8, 4.0), DimensionError);
  const GridSpec g = GridSpec::uniform(2, 8, 4.0, 6, 3.0);
  CHECK(g.rank() == 5);
  CHECK(g.slice_size() == 8u * 8u * 8u * 8u);
  CHECK(g.size() == g.slice_size() * 6u);
  CHECK(g.axis(0).spacing() == doctest::Approx(1.0));
  std::vector<int> idx(4);
  g.z_unflat(1234, idx);
  CHECK(g.z_flat(idx) == 1234u);
}

TEST_CASE("transform pairs are mutually inverse on random fields") {
  for (const GridSpec& g : {GridSpec::uniform(1, 16, 5.0, 8, 3.0), GridSpec::uniform(2, 8, 4.0, 6, 2.0)}) {
    const Field f = random_field(g, Repr::Physical, 1);
    const Field back = inverse_partial_ft(partial_ft(f));
    CHECK(relative_l2_error(back, f) <= 1e-10);
    const Field p = random_field(g, Repr::Partial, 2);
    CHECK(relative_l2_error(inverse_fft_z(fft_z(p)), p) <= 1e-10);
    const Field s = to_repr(to_repr(f, Repr::Spectral), Repr::Physical);
    CHECK(relative_l2_error(s, f) <= 1e-10);
  }
}

TEST_CASE("discrete Parseval across representations") {
  const GridSpec g = GridSpec::uniform(1, 32, 6.0, 16, 4.0);
  const Field f = random_field(g, Repr::Physical, 3);
  const double n0 = l2_norm(f);
  const Field p = partial_ft(f);
  const Field s = fft_z(p);
  CHECK(std::abs(l2_norm(p) - n0) <= 1e-10 * n0);
  CHECK(std::abs(l2_norm(s) - n0) <= 1e-10 * n0);
  const Field g2 = random_field(g, Repr::Physical, 4);
  const cplx ip = inner_product(f, g2);
  const cplx ips = inner_product(to_repr(f, Repr::Spectral), to_repr(g2, Repr::Spectral));
  CHECK(std::abs(ip - ips) <= 1e-10 * std::abs(ip) + 1e-12);
  CHECK(l2_norm(Field(g, Repr::Physical)) == 0.0);
}

TEST_CASE("Gaussian transform pairs") {
  const GridSpec g = GridSpec::uniform(1, 64, 8.0, 64, 12.0);
  const double w = 1.5;
  Field f(g, Repr::Physical);
  std::vector<double> z(2);
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_coords(zf, z);
    const double gz = std::exp(-(z[0] * z[0] + z[1] * z[1]) / 2.0);
    for (int m = 0; m < g.center().n; ++m) {
      const double s = g.center().node(m);
      f.at(zf, m) = gz * std::exp(-s * s / (2.0 * w * w));
    }
  }
  // (1/2pi) int e^{-i a s} e^{-s^2/2w^2} ds = w / sqrt(2 pi) e^{-w^2 a^2 / 2}
  const Field p = partial_ft(f);
  double err = 0.0;
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_coords(zf, z);
    const double gz = std::exp(-(z[0] * z[0] + z[1] * z[1]) / 2.0);
    for (int m = 0; m < g.center().n; ++m) {
      const double a = g.center().freq(m);
      const double expect = gz * w / std::sqrt(2.0 * kPi) * std::exp(-w * w * a * a / 2.0);
      err = std::max(err, std::abs(p.at(zf, m) - expect));
    }
  }
  CHECK(err <= 1e-12);
  // (2pi)^{-2} int e^{-i eta.z} e^{-|z|^2/2} dz = (2pi)^{-1} e^{-|eta|^2/2}
  const Field s = fft_z(p);
  err = 0.0;
  std::vector<int> idx(2);
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_unflat(zf, idx);
    const double e0 = g.axis(0).freq(idx[0]), e1 = g.axis(1).freq(idx[1]);
    const double gz = std::exp(-(e0 * e0 + e1 * e1) / 2.0) / (2.0 * kPi);
    const int m = g.center().n / 2 + 3;
    const double a = g.center().freq(m);
    const double expect = gz * w / std::sqrt(2.0 * kPi) * std::exp(-w * w * a * a / 2.0);
    err = std::max(err, std::abs(s.at(zf, m) - expect));
  }
  CHECK(err <= 1e-12);
}

TEST_CASE("packets: normalization, modulation and preconditions") {
  const GridSpec g = GridSpec::uniform(1, 64, 8.0, 32, 16.0);
  const Field f = make_packet(centered_packet(1), g);
  CHECK(std::abs(l2_norm(f) - 1.0) <= 1e-8);
  CHECK(f.repr == Repr::Physical);
  CHECK(boundary_mass(f) < 1e-12);

  GaussianPacketSpec mod = centered_packet(1);
  mod.momentum = {2.0, -1.0, 0.0};
  const Field s = to_repr(make_packet(mod, g), Repr::Spectral);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    if (std::abs(s.values[i]) > std::abs(s.values[best])) best = i;
  }
  std::vector<int> idx(2);
  g.z_unflat(best / static_cast<std::size_t>(g.center().n), idx);
  CHECK(g.axis(0).freq(idx[0]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(g.axis(1).freq(idx[1]) == doctest::Approx(-1.0).epsilon(0.1));

  GaussianPacketSpec narrow = centered_packet(1);
  narrow.widths[0] = 0.05;
  CHECK_THROWS_AS(make_packet(narrow, g), std::invalid_argument);
  GaussianPacketSpec off = centered_packet(1);
  off.center = HPoint({5.0, 0.0}, 0.0);
  CHECK_THROWS_WITH_AS(make_packet(off, g), doctest::Contains("margin"), std::invalid_argument);
}

TEST_CASE("sup norm") {
  const GridSpec g = GridSpec::uniform(1, 32, 8.0, 16, 16.0);
  CHECK(sup_norm_sampled(Field(g, Repr::Physical)) == 0.0);
  GaussianPacketSpec spec = centered_packet(1);
  const Field f = make_packet(spec, g);
  const std::size_t zc = g.slice_size() / 2 + 16;  // node (0, 0)
  CHECK(sup_norm_sampled(f) == doctest::Approx(std::abs(f.at(zc, 8))));
  CHECK_THROWS_AS(sup_norm_sampled(partial_ft(f)), RepresentationError);
}

TEST_CASE("interpolation: nodes, linears, convergence order, clipping") {
  const GridSpec g = GridSpec::uniform(1, 32, 4.0, 16, 4.0);
  const Field r = random_field(g, Repr::Physical, 5);
  InterpStats st;
  std::vector<int> idx(2);
  for (std::size_t zf = 0; zf < g.slice_size(); zf += 37) {
    g.z_unflat(zf, idx);
    for (int m = 0; m < g.center().n; m += 3) {
      const std::vector<double> c{g.axis(0).node(idx[0]), g.axis(1).node(idx[1]), g.center().node(m)};
      CHECK(interpolate(r, c, &st) == r.at(zf, m));
    }
  }
  CHECK(st.clipped == 0);

  Field lin(g, Repr::Physical);
  std::vector<double> z(2);
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_coords(zf, z);
    for (int m = 0; m < g.center().n; ++m) lin.at(zf, m) = {1.0 + 2.0 * z[0] - 0.5 * z[1], 3.0 * g.center().node(m)};
  }
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> c{u(gen), u(gen), u(gen)};
    const cplx expect{1.0 + 2.0 * c[0] - 0.5 * c[1], 3.0 * c[2]};
    CHECK(std::abs(interpolate(lin, c) - expect) <= 1e-12);
  }

  auto gauss_err = [](int n) {
    const GridSpec gg = GridSpec::uniform(1, n, 6.0, n, 6.0);
    Field f(gg, Repr::Physical);
    std::vector<double> zz(2);
    for (std::size_t zf = 0; zf < gg.slice_size(); ++zf) {
      gg.z_coords(zf, zz);
      for (int m = 0; m < gg.center().n; ++m) {
        const double s = gg.center().node(m);
        f.at(zf, m) = std::exp(-(zz[0] * zz[0] + zz[1] * zz[1] + s * s) / 2.0);
      }
    }
    std::mt19937_64 gq(8);
    std::uniform_real_distribution<double> uq(-2.0, 2.0);
    double e = 0.0;
    for (int k = 0; k < 300; ++k) {
      const std::vector<double> c{uq(gq), uq(gq), uq(gq)};
      const double ex = std::exp(-(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) / 2.0);
      e = std::max(e, std::abs(interpolate(f, c) - ex));
    }
    return e;
  };
  const double e1 = gauss_err(32), e2 = gauss_err(64);
  MESSAGE("interp errors " << e1 << " " << e2 << " ratio " << e1 / e2);
  CHECK(std::log2(e1 / e2) >= 2.7);

  InterpStats clip;
  CHECK(interpolate(r, std::vector<double>{10.0, 0.0, 0.0}, &clip) == cplx{0.0, 0.0});
  CHECK(clip.clipped == 1);
  CHECK(clip.evaluations == 1);
  const auto sl = r.slice(3);
  CHECK(interpolate_slice(r, 3, std::vector<double>{g.axis(0).node(4), g.axis(1).node(9)}) ==
        sl[g.z_flat(std::vector<int>{4, 9})]);
  CHECK(interpolate_slice_data(g, sl, std::vector<double>{g.axis(0).node(4), g.axis(1).node(9)}) ==
        sl[g.z_flat(std::vector<int>{4, 9})]);
}

TEST_CASE("band-limited interpolation is exact at nodes and spectrally accurate") {
  const GridSpec g = GridSpec::uniform(1, 16, 4.0, 8, 4.0);
  const Field r = random_field(g, Repr::Physical, 11);
  std::vector<int> idx(2);
  for (std::size_t zf = 0; zf < g.slice_size(); zf += 23) {
    g.z_unflat(zf, idx);
    for (int m = 0; m < g.center().n; m += 3) {
      const std::vector<double> c{g.axis(0).node(idx[0]), g.axis(1).node(idx[1]), g.center().node(m)};
      CHECK(std::abs(interpolate_bandlimited(r, c) - r.at(zf, m)) <= 1e-12);
    }
  }

  const GridSpec gg = GridSpec::uniform(1, 32, 7.0, 32, 12.0);
  const Field f = make_packet({HPoint::identity(1), {1.0, 1.0, 1.5}, {0.3, 0.0, -0.2}}, gg);
  // The origin is a node, so its sample is the normalization constant.
  const cplx amp = f.at(gg.z_flat(std::vector<int>{16, 16}), 16);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_trig = 0.0, worst_cubic = 0.0;
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> c{u(gen), u(gen), u(gen)};
    const cplx ex = amp * std::exp(cplx{-(c[0] * c[0] + c[1] * c[1]) / 2.0 - c[2] * c[2] / 4.5, 0.3 * c[0] - 0.2 * c[2]});
    worst_trig = std::max(worst_trig, std::abs(interpolate_bandlimited(f, c) - ex));
    worst_cubic = std::max(worst_cubic, std::abs(interpolate(f, c) - ex));
  }
  MESSAGE("trig " << worst_trig << " cubic " << worst_cubic);
  CHECK(worst_trig <= 1e-8);
  CHECK(worst_trig < 1e-3 * worst_cubic);
}

TEST_CASE("representation tags are enforced") {
  const GridSpec g = GridSpec::uniform(1, 16, 4.0, 8, 4.0);
  const Field f(g, Repr::Physical);
  CHECK_THROWS_AS(inverse_partial_ft(f), RepresentationError);
  CHECK_THROWS_AS(fft_z(f), RepresentationError);
  CHECK_THROWS_AS(inverse_fft_z(partial_ft(f)), RepresentationError);
  CHECK_THROWS_AS(partial_ft(partial_ft(f)), RepresentationError);
}

TEST_CASE("boundary mass monitor") {
  const GridSpec g = GridSpec::uniform(1, 32, 4.0, 16, 4.0);
  Field f(g, Repr::Physical);
  f.at(0, 8) = 1.0;
  f.at(g.slice_size() / 2 + 16, 8) = 1.0;
  CHECK(boundary_mass(f) == doctest::Approx(0.5));
  CHECK_THROWS_AS(check_boundary_mass(f), NumericalAbort);
}

TEST_CASE("HFLD1 round trip and CSV cut") {
  const GridSpec g = GridSpec::uniform(1, 16, 4.0, 8, 3.0);
  const Field f = partial_ft(random_field(g, Repr::Physical, 9));
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "hch_test_field.hfld").string();
  write_hfld(f, path);
  CHECK(std::filesystem::file_size(path) == 5 + 4 + 1 + 3 * 12 + 8 + f.values.size() * 16);
  const Field back = read_hfld(path);
  CHECK(back.repr == Repr::Partial);
  CHECK(back.grid == f.grid);
  CHECK(max_abs_diff(back, f) == 0.0);
  std::remove(path.c_str());

  const std::string csv = (dir / "hch_test_cut.csv").string();
  write_slice_csv(f, 2, csv);
  std::ifstream is(csv);
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 1 + g.center().n);
  std::remove(csv.c_str());
}

}  // TEST_SUITE
