#include "hch/hgroup.hpp"

#include <cmath>
#include <string>

namespace hch {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

HPoint::HPoint(std::vector<double> z_, double s_) : z(std::move(z_)), s(s_) {
  if (z.empty() || z.size() % 2 != 0) {
    throw DimensionError("HPoint: horizontal part must have even length 2d, d >= 1");
  }
}

HPoint HPoint::identity(int d) {
  if (d < 1) throw DimensionError("HPoint::identity: d must be >= 1");
  return HPoint(std::vector<double>(2 * static_cast<std::size_t>(d), 0.0), 0.0);
}

double sigma_form(std::span<const double> z, std::span<const double> zeta) {
  require_same_dim(z.size(), zeta.size(), "sigma_form");
  if (z.size() % 2 != 0) throw DimensionError("sigma_form: odd length");
  const std::size_t d = z.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    // x'^i y^i - x^i y'^i
    acc += zeta[i] * z[d + i] - z[i] * zeta[d + i];
  }
  return acc;
}

std::vector<double> ztilde(std::span<const double> z) {
  if (z.size() % 2 != 0) throw DimensionError("ztilde: odd length");
  const std::size_t d = z.size() / 2;
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < d; ++i) {
    out[i] = z[d + i];
    out[d + i] = -z[i];
  }
  return out;
}

HPoint group_mul(const HPoint& p, const HPoint& q) {
  require_same_dim(p.z.size(), q.z.size(), "group_mul");
  HPoint r;
  r.z.resize(p.z.size());
  for (std::size_t i = 0; i < p.z.size(); ++i) r.z[i] = p.z[i] + q.z[i];
  r.s = p.s + q.s + sigma_form(p.z, q.z);
  return r;
}

HPoint group_inv(const HPoint& p) {
  HPoint r;
  r.z.resize(p.z.size());
  for (std::size_t i = 0; i < p.z.size(); ++i) r.z[i] = -p.z[i];
  r.s = -p.s;
  return r;
}

HPoint dilate(const HPoint& p, double lambda) {
  HPoint r = p;
  for (double& v : r.z) v *= lambda;
  r.s *= lambda * lambda;
  return r;
}

GaugeValue koranyi_gauge(const HPoint& p) {
  double r2 = 0.0;
  for (double v : p.z) r2 += v * v;
  return GaugeValue{std::pow(r2 * r2 + p.s * p.s, 0.25)};
}

GaugeValue koranyi_dist(const HPoint& p, const HPoint& q) {
  require_same_dim(p.z.size(), q.z.size(), "koranyi_dist");
  return koranyi_gauge(group_mul(group_inv(p), q));
}

HPoint horizontal_segment(const HPoint& start, const HVelocity& xi, double r) {
  require_same_dim(start.z.size(), xi.xi.size(), "horizontal_segment");
  HPoint out;
  out.z.resize(start.z.size());
  for (std::size_t i = 0; i < start.z.size(); ++i) out.z[i] = start.z[i] + r * xi.xi[i];
  out.s = start.s + r * sigma_form(start.z, xi.xi);
  return out;
}

}  // namespace hch
