#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hch/hgroup.hpp"

namespace hch {

using cplx = std::complex<double>;

/// Which variables the stored samples are indexed by.
enum class Repr : std::uint8_t {
  Physical = 0,  // (z, s)
  Partial = 1,   // (z, alpha): s-axis transformed
  Spectral = 2,  // (eta, alpha): all axes transformed
};

const char* repr_name(Repr r);

class RepresentationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a run must stop because the numerics can no longer be trusted
/// (boundary leakage, caustics, non-converging extrapolation).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One grid axis covering [-half_width, half_width) with n nodes.
struct Axis {
  int n = 0;
  double half_width = 0.0;

  double spacing() const { return 2.0 * half_width / n; }
  double node(int j) const { return -half_width + j * spacing(); }
  /// Dual-grid spacing pi / half_width.
  double freq_spacing() const;
  /// Frequency of index m, centered: (m - n/2) * freq_spacing().
  double freq(int m) const { return (m - n / 2) * freq_spacing(); }
};

/// Rectangular grid: 2d horizontal axes (x^1..x^d, y^1..y^d) then the center axis.
/// Storage is row-major with the center axis fastest.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int d, std::vector<Axis> axes);

  /// Same (n, half_width) on every horizontal axis.
  static GridSpec uniform(int d, int nz, double lz, int ns, double ls);

  int dim() const { return d_; }
  int rank() const { return 2 * d_ + 1; }
  const Axis& axis(int a) const { return axes_.at(static_cast<std::size_t>(a)); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& center() const { return axes_.back(); }

  std::size_t size() const { return slice_size_ * static_cast<std::size_t>(center().n); }
  /// Number of horizontal nodes (one center-axis slice).
  std::size_t slice_size() const { return slice_size_; }
  /// Flat index of a horizontal multi-index.
  std::size_t z_flat(std::span<const int> idx) const;
  /// Inverse of z_flat.
  void z_unflat(std::size_t flat, std::span<int> idx) const;
  /// Horizontal coordinates of the node with flat z-index.
  void z_coords(std::size_t flat, std::span<double> out) const;

  bool operator==(const GridSpec& o) const;

 private:
  int d_ = 0;
  std::vector<Axis> axes_;
  std::size_t slice_size_ = 0;
};

/// Complex samples on a grid in one of three representations.
struct Field {
  GridSpec grid;
  Repr repr = Repr::Physical;
  std::vector<cplx> values;

  Field() = default;
  Field(GridSpec g, Repr r);
  Field(GridSpec g, Repr r, std::vector<cplx> v);

  std::size_t index(std::size_t zflat, int m) const {
    return zflat * static_cast<std::size_t>(grid.center().n) + static_cast<std::size_t>(m);
  }
  cplx& at(std::size_t zflat, int m) { return values[index(zflat, m)]; }
  const cplx& at(std::size_t zflat, int m) const { return values[index(zflat, m)]; }

  /// Copy of the horizontal slice with center index m.
  std::vector<cplx> slice(int m) const;
  void set_slice(int m, std::span<const cplx> data);

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx a);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx a, Field f);

void require_repr(const Field& f, Repr r, const char* op);
void require_same_grid(const Field& a, const Field& b, const char* op);

/// s-axis transform, kernel e^{-i alpha s} / (2 pi).
Field partial_ft(const Field& f);
Field inverse_partial_ft(const Field& f);
/// Horizontal transform per alpha slice, kernel (2 pi)^{-2d} e^{-i eta.z}.
Field fft_z(const Field& f);
Field inverse_fft_z(const Field& f);
/// Chains the transforms above to reach the requested representation.
Field to_repr(const Field& f, Repr target);

/// Per-slice versions used inside the step operators. Data is one horizontal
/// slice in the layout of GridSpec::z_flat.
void fft_z_slice(const GridSpec& g, std::span<cplx> data);
void inverse_fft_z_slice(const GridSpec& g, std::span<cplx> data);

/// Cell-volume weight for |values|^2 so that the norm is representation independent.
double norm_weight(const GridSpec& g, Repr r);
double l2_norm(const Field& f);
cplx inner_product(const Field& f, const Field& g);
double l2_distance(const Field& a, const Field& b);
/// ||a - b|| / ||b||.
double relative_l2_error(const Field& a, const Field& b);
double sup_norm_sampled(const Field& f);

/// Counts evaluations that fell outside the grid hull and were returned as 0.
struct InterpStats {
  std::uint64_t evaluations = 0;
  std::uint64_t clipped = 0;

  double clip_rate() const {
    return evaluations == 0 ? 0.0 : static_cast<double>(clipped) / static_cast<double>(evaluations);
  }
  InterpStats& operator+=(const InterpStats& o) {
    evaluations += o.evaluations;
    clipped += o.clipped;
    return *this;
  }
};

/// Separable Catmull-Rom interpolation over all 2d+1 axes of a physical field.
cplx interpolate(const Field& f, std::span<const double> coord, InterpStats* stats = nullptr);

/// Trigonometric interpolant of the grid data on the frequencies of Axis::freq,
/// summed over every node. Periodic outside the box. Exact at the nodes.
cplx interpolate_bandlimited(const Field& f, std::span<const double> coord);

/// Same over the 2d horizontal axes of slice m (physical or partial field).
cplx interpolate_slice(const Field& f, int m, std::span<const double> z, InterpStats* stats = nullptr);
/// Horizontal interpolation over raw slice data.
cplx interpolate_slice_data(const GridSpec& g, std::span<const cplx> slice, std::span<const double> z,
                            InterpStats* stats = nullptr);

/// Modulated Gaussian prod_a exp(-(u_a - c_a)^2 / (2 w_a^2) + i k_a u_a).
struct GaussianPacketSpec {
  HPoint center;
  std::vector<double> widths;    // 2d+1 entries
  std::vector<double> momentum;  // 2d+1 entries, empty means zero
};

/// Physical field, L2-normalized. Requires 6 widths of margin to every
/// boundary and widths no smaller than the grid spacing.
Field make_packet(const GaussianPacketSpec& spec, const GridSpec& grid);

/// Fraction of squared norm carried by the outermost max(1, N/16) nodes of any axis.
double boundary_mass(const Field& f);
/// Throws NumericalAbort when boundary_mass exceeds the threshold.
void check_boundary_mass(const Field& f, double threshold = 1e-6, const char* where = "field");

/// Binary dump: "HFLD1", uint32 d, uint8 repr, per axis (uint32 n, float64 half_width),
/// uint64 count, then count (re, im) float64 pairs. Little-endian.
void write_hfld(const Field& f, const std::string& path);
Field read_hfld(const std::string& path);

/// CSV of the 1-D cut along `axis` through the grid midpoint: coord,re,im,abs.
void write_slice_csv(const Field& f, int axis, const std::string& path);

}  // namespace hch
