#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace hch {

/// Point (z, s) of H^d. z holds x^1..x^d followed by y^1..y^d.
struct HPoint {
  std::vector<double> z;
  double s = 0.0;

  HPoint() = default;
  HPoint(std::vector<double> z_, double s_);

  int dim() const { return static_cast<int>(z.size() / 2); }

  static HPoint identity(int d);
};

/// Frame coefficients of a horizontal tangent vector in {X_1..X_d, Y_1..Y_d}.
struct HVelocity {
  std::vector<double> xi;
};

/// Value of the homogeneous (Koranyi) gauge. Nonnegative.
struct GaugeValue {
  double value = 0.0;
  operator double() const { return value; }
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Twisted product (x+x', y+y', s+s'+x'.y-x.y').
HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint group_inv(const HPoint& p);

/// x'.y - x.y' for z=(x,y), zeta=(x',y').
double sigma_form(std::span<const double> z, std::span<const double> zeta);

/// (z2, -z1). Satisfies eta . ztilde(z) == sigma_form(z, eta).
std::vector<double> ztilde(std::span<const double> z);

/// delta_lambda(z, s) = (lambda z, lambda^2 s).
HPoint dilate(const HPoint& p, double lambda);

/// (|z|^4 + s^2)^{1/4}.
GaugeValue koranyi_gauge(const HPoint& p);
GaugeValue koranyi_dist(const HPoint& p, const HPoint& q);

/// Point reached at time r along the horizontal line with constant frame
/// velocity xi: (z + r xi, s + r sigma_form(z, xi)).
HPoint horizontal_segment(const HPoint& start, const HVelocity& xi, double r);

}  // namespace hch
