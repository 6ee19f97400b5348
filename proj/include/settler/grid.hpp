#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace settler {

/// One piece of a vessel's cross-sectional area A(z), depth z measured downward.
/// cylinder: constant area; cone: radius varies linearly between the end areas;
/// step: area_top on [z_top, z_step), area_bottom on [z_step, z_bottom].
struct AreaSegment {
  enum class Kind { cylinder, cone, step };

  Kind kind = Kind::cylinder;
  double z_top = 0.0;
  double z_bottom = 0.0;
  double area_top = 0.0;
  double area_bottom = 0.0;
  double z_step = 0.0;

  static AreaSegment cylinder(double z_top, double z_bottom, double area) {
    return {Kind::cylinder, z_top, z_bottom, area, area, z_top};
  }
  static AreaSegment cone(double z_top, double z_bottom, double area_top, double area_bottom) {
    return {Kind::cone, z_top, z_bottom, area_top, area_bottom, z_top};
  }
  static AreaSegment step(double z_top, double z_bottom, double z_step, double area_top,
                          double area_bottom) {
    return {Kind::step, z_top, z_bottom, area_top, area_bottom, z_step};
  }

  double area(double z) const {
    switch (kind) {
      case Kind::cylinder:
        return area_top;
      case Kind::step:
        return z < z_step ? area_top : area_bottom;
      case Kind::cone: {
        const double r = radius_at(z);
        return std::numbers::pi * r * r;
      }
    }
    return area_top;
  }

  /// Exact integral of A over [a, b], a subset of the segment.
  double integrate(double a, double b) const {
    if (b <= a) {
      return 0.0;
    }
    switch (kind) {
      case Kind::cylinder:
        return area_top * (b - a);
      case Kind::step: {
        const double upper = std::clamp(z_step, a, b);
        return area_top * (upper - a) + area_bottom * (b - upper);
      }
      case Kind::cone: {
        const double ra = radius_at(a);
        const double rb = radius_at(b);
        return std::numbers::pi * (b - a) * (ra * ra + ra * rb + rb * rb) / 3.0;
      }
    }
    return 0.0;
  }

  bool operator==(const AreaSegment&) const = default;

 private:
  double radius_at(double z) const {
    const double rt = std::sqrt(area_top / std::numbers::pi);
    const double rb = std::sqrt(area_bottom / std::numbers::pi);
    const double s = (z - z_top) / (z_bottom - z_top);
    return rt + (rb - rt) * s;
  }
};

/// Piecewise area profile over [-H, B], extended by its end values outside.
class AreaProfile {
 public:
  AreaProfile() = default;
  explicit AreaProfile(std::vector<AreaSegment> segments) : segments_(std::move(segments)) {
    std::sort(segments_.begin(), segments_.end(),
              [](const AreaSegment& a, const AreaSegment& b) { return a.z_top < b.z_top; });
  }

  static AreaProfile constant(double H, double B, double area) {
    return AreaProfile({AreaSegment::cylinder(-H, B, area)});
  }

  /// Stand-in for a flared clarifier: wide top cylinder, cone, narrow bottom cylinder.
  static AreaProfile v7like() {
    return AreaProfile({AreaSegment::cylinder(-1.0, 0.5, 450.0), AreaSegment::cone(0.5, 3.0, 450.0, 120.0),
                        AreaSegment::cylinder(3.0, 4.0, 120.0)});
  }

  const std::vector<AreaSegment>& segments() const { return segments_; }

  /// Throws unless the segments tile [-H, B] without gaps or overlaps and all areas are positive.
  void validate(double H, double B) const {
    if (segments_.empty()) {
      throw std::invalid_argument("area profile: no segments");
    }
    const double tol = 1e-12 * std::max(1.0, H + B);
    if (std::abs(segments_.front().z_top + H) > tol || std::abs(segments_.back().z_bottom - B) > tol) {
      throw std::invalid_argument("area profile: segments must span [-H, B]");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& s = segments_[i];
      if (!(s.z_bottom > s.z_top)) {
        throw std::invalid_argument("area profile: segment " + std::to_string(i) + " has no extent");
      }
      if (!(s.area_top > 0.0) || !(s.area_bottom > 0.0)) {
        throw std::invalid_argument("area profile: segment " + std::to_string(i) + " has nonpositive area");
      }
      if (s.kind == AreaSegment::Kind::step && (s.z_step < s.z_top || s.z_step > s.z_bottom)) {
        throw std::invalid_argument("area profile: step location outside segment " + std::to_string(i));
      }
      if (i > 0 && std::abs(segments_[i - 1].z_bottom - s.z_top) > tol) {
        throw std::invalid_argument("area profile: gap or overlap before segment " + std::to_string(i));
      }
    }
  }

  double area(double z) const {
    if (z <= top()) {
      return segments_.front().area(top());
    }
    if (z >= bottom()) {
      return segments_.back().area(bottom());
    }
    for (const auto& s : segments_) {
      if (z < s.z_bottom) {
        return s.area(z);
      }
    }
    return segments_.back().area(bottom());
  }

  /// Exact integral of A over [a, b] with constant extension outside the profile.
  double integrate(double a, double b) const {
    if (b <= a) {
      return 0.0;
    }
    double total = 0.0;
    if (a < top()) {
      total += segments_.front().area(top()) * (std::min(b, top()) - a);
    }
    if (b > bottom()) {
      total += segments_.back().area(bottom()) * (b - std::max(a, bottom()));
    }
    for (const auto& s : segments_) {
      const double lo = std::max(a, s.z_top);
      const double hi = std::min(b, s.z_bottom);
      if (hi > lo) {
        total += s.integrate(lo, hi);
      }
    }
    return total;
  }

  bool operator==(const AreaProfile&) const = default;

 private:
  double top() const { return segments_.front().z_top; }
  double bottom() const { return segments_.back().z_bottom; }

  std::vector<AreaSegment> segments_;
};

enum class FaceAreaMode { average, point };

/// Cell layout over [-H, B]. Cells j = 0..N+1 (0 and N+1 are the effluent and
/// underflow layers); faces are stored at index f = j+1 for z_{j+1/2}, so face
/// f = 0 is z_{-1/2} and f = N+2 is z_{N+3/2}. Cell j sits between faces j and j+1.
struct Grid {
  double H = 0.0;
  double B = 0.0;
  int N = 0;
  double dz = 0.0;
  int feed_cell = 0;
  std::vector<double> z_cell;
  std::vector<double> z_face;
  std::vector<double> A_cell;
  std::vector<double> A_face;
  std::vector<std::uint8_t> gamma_cell;
  std::vector<std::uint8_t> gamma_face;
  double A_min = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  bool constant_area = false;

  std::size_t num_cells() const { return static_cast<std::size_t>(N) + 2; }
  std::size_t num_faces() const { return static_cast<std::size_t>(N) + 3; }
  /// gamma^f_{j+1/2} = 1 for faces above the feed layer.
  bool face_above_feed(std::size_t f) const { return static_cast<int>(f) - 1 < feed_cell; }
};

/// Area-ratio constants over the interior cells.
struct AreaConstants {
  double M1 = 0.0;
  double M2 = 0.0;
  double A_min = 0.0;
};

inline AreaConstants area_constants(const Grid& g) {
  AreaConstants c;
  c.A_min = *std::min_element(g.A_cell.begin(), g.A_cell.end());
  for (int j = 1; j <= g.N; ++j) {
    const double up = g.A_face[static_cast<std::size_t>(j)];
    const double down = g.A_face[static_cast<std::size_t>(j) + 1];
    const double a = g.A_cell[static_cast<std::size_t>(j)];
    c.M1 = std::max({c.M1, up / a, down / a});
    c.M2 = std::max(c.M2, (up + down) / a);
  }
  return c;
}

inline int feed_layer_index(double H, double dz) {
  const double ratio = H / dz;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::ceil(ratio));
}

inline Grid build_grid(const AreaProfile& profile, double H, double B, int N,
                       FaceAreaMode face_mode = FaceAreaMode::average) {
  if (N < 2) {
    throw std::invalid_argument("build_grid: N must be at least 2");
  }
  if (!(H > 0.0) || !(B > 0.0)) {
    throw std::invalid_argument("build_grid: H and B must be positive");
  }
  profile.validate(H, B);

  Grid g;
  g.H = H;
  g.B = B;
  g.N = N;
  g.dz = (B + H) / N;
  g.feed_cell = feed_layer_index(H, g.dz);
  if (g.feed_cell < 1 || g.feed_cell > N) {
    throw std::invalid_argument("build_grid: feed layer outside the vessel");
  }

  const std::size_t nc = g.num_cells();
  const std::size_t nf = g.num_faces();
  g.z_cell.resize(nc);
  g.A_cell.resize(nc);
  g.gamma_cell.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const double z = -H + (static_cast<double>(j) - 0.5) * g.dz;
    g.z_cell[j] = z;
    g.A_cell[j] = profile.integrate(z - 0.5 * g.dz, z + 0.5 * g.dz) / g.dz;
    g.gamma_cell[j] = (j >= 1 && j <= static_cast<std::size_t>(N)) ? 1 : 0;
  }
  g.z_face.resize(nf);
  g.A_face.resize(nf);
  g.gamma_face.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    // face f is z_{j+1/2} with j = f - 1
    const double z = -H + (static_cast<double>(f) - 1.0) * g.dz;
    g.z_face[f] = z;
    g.A_face[f] = face_mode == FaceAreaMode::average
                      ? profile.integrate(z - 0.5 * g.dz, z + 0.5 * g.dz) / g.dz
                      : profile.area(z);
    g.gamma_face[f] = (f >= 2 && f <= static_cast<std::size_t>(N)) ? 1 : 0;
  }
  const auto c = area_constants(g);
  g.A_min = c.A_min;
  g.M1 = c.M1;
  g.M2 = c.M2;
  const auto [lo, hi] = std::minmax_element(g.A_cell.begin(), g.A_cell.end());
  const auto [flo, fhi] = std::minmax_element(g.A_face.begin(), g.A_face.end());
  g.constant_area = *lo == *hi && *flo == *fhi && *lo == *flo;
  return g;
}

}  // namespace settler
