#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdsym {

struct Point {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

/// Planar radial domain: a disk (inner_radius == 0) or an annulus.
struct DomainSpec {
  double inner_radius = 0.0;
  double outer_radius = 1.0;

  DomainSpec() = default;
  DomainSpec(double a1, double a2) : inner_radius(a1), outer_radius(a2) {
    if (!(inner_radius >= 0.0) || !(outer_radius > inner_radius) ||
        !std::isfinite(outer_radius)) {
      throw std::invalid_argument("DomainSpec: need 0 <= inner_radius < outer_radius < inf");
    }
  }

  bool is_disk() const { return inner_radius == 0.0; }
  bool is_annulus() const { return inner_radius > 0.0; }

  bool contains(Point p, double tol = 0.0) const {
    const double r = p.norm();
    return r >= inner_radius - tol && r <= outer_radius + tol;
  }

  /// Half the radial gap; the natural cap for boundary-band scans.
  /// (The annulus bound is read as (A2 - A1)/2, the disk bound as A2/2.)
  double half_gap() const {
    return is_disk() ? 0.5 * outer_radius : 0.5 * (outer_radius - inner_radius);
  }
};

/// Unit vector e on S^1.  Indexes the hyperplane H(e) = {x.e = 0}, the
/// half domain B(e) = {x in B : x.e > 0}, and the reflection sigma_e.
struct Direction {
  double angle = 0.0;  // in [0, 2*pi)

  Direction() = default;
  explicit Direction(double psi) {
    const double two_pi = 2.0 * std::numbers::pi;
    angle = std::fmod(psi, two_pi);
    if (angle < 0.0) angle += two_pi;
  }

  double ex() const { return std::cos(angle); }
  double ey() const { return std::sin(angle); }
  Point vec() const { return {ex(), ey()}; }

  Direction opposite() const { return Direction(angle + std::numbers::pi); }
};

/// Reflection across H(e): x - 2 (x.e) e.  Involution, preserves |x|.
inline Point reflect_point(Point x, Direction e) {
  const double s = 2.0 * (x.x * e.ex() + x.y * e.ey());
  return {x.x - s * e.ex(), x.y - s * e.ey()};
}

/// Uniform polar discretization of a DomainSpec.
///
/// Rings j = j_first()..n_r at radii A1 + j*dr, each carrying n_theta nodes
/// at angles phi_k = 2*pi*k/n_theta.  A disk additionally stores a single
/// origin node (index 0) shared by all angular columns.  The outer ring is
/// always Dirichlet boundary; the inner ring is boundary iff annulus.
class PolarGrid {
 public:
  PolarGrid(DomainSpec domain, int n_r, int n_theta)
      : domain_(domain), n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 8) throw std::invalid_argument("PolarGrid: n_r must be >= 8");
    if (n_theta < 16 || n_theta % 2 != 0)
      throw std::invalid_argument("PolarGrid: n_theta must be even and >= 16");
    dr_ = (domain.outer_radius - domain.inner_radius) / n_r;
    dphi_ = 2.0 * std::numbers::pi / n_theta;
    build();
  }

  const DomainSpec& domain() const { return domain_; }
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  double dr() const { return dr_; }
  double dphi() const { return dphi_; }

  /// Max of the radial spacing and the outer-ring arc spacing.
  double h() const { return std::max(dr_, domain_.outer_radius * dphi_); }

  bool has_origin() const { return domain_.is_disk(); }
  std::size_t origin_index() const { return 0; }

  int ring_first() const { return has_origin() ? 1 : 0; }
  int ring_last() const { return n_r_; }
  double ring_radius(int j) const { return domain_.inner_radius + j * dr_; }
  double node_angle(int k) const { return k * dphi_; }

  std::size_t node_count() const { return nodes_; }
  std::size_t node_index(int j, int k) const {
    return origin_offset_ + static_cast<std::size_t>(j - ring_first()) * n_theta_ + k;
  }
  bool is_origin(std::size_t i) const { return has_origin() && i == 0; }

  int ring_of(std::size_t i) const {
    if (is_origin(i)) return -1;  // origin sits below ring_first()
    return ring_first() + static_cast<int>((i - origin_offset_) / n_theta_);
  }
  int angle_index_of(std::size_t i) const {
    if (is_origin(i)) return 0;
    return static_cast<int>((i - origin_offset_) % n_theta_);
  }

  double radius(std::size_t i) const { return r_[i]; }
  double angle(std::size_t i) const { return phi_[i]; }
  Point position(std::size_t i) const { return {x_[i], y_[i]}; }

  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }
  bool is_interior(std::size_t i) const { return boundary_[i] == 0; }
  std::size_t interior_count() const { return interior_count_; }

  /// Polar area weight of the node cell; cells telescope so that the
  /// weights sum exactly to the domain area.  Origin weight pi*(dr/2)^2.
  double weight(std::size_t i) const { return w_[i]; }

  /// dist(x, dB): disk A2 - r; annulus min(r - A1, A2 - r).
  double boundary_distance(std::size_t i) const {
    const double r = r_[i];
    const double outer = domain_.outer_radius - r;
    return domain_.is_annulus() ? std::min(r - domain_.inner_radius, outer) : outer;
  }

 private:
  void build() {
    origin_offset_ = has_origin() ? 1 : 0;
    const std::size_t ring_nodes =
        static_cast<std::size_t>(ring_last() - ring_first() + 1) * n_theta_;
    nodes_ = origin_offset_ + ring_nodes;

    x_.resize(nodes_);
    y_.resize(nodes_);
    r_.resize(nodes_);
    phi_.resize(nodes_);
    w_.resize(nodes_);
    boundary_.assign(nodes_, 0);

    if (has_origin()) {
      x_[0] = y_[0] = r_[0] = phi_[0] = 0.0;
      w_[0] = std::numbers::pi * 0.25 * dr_ * dr_;
    }

    const double a1 = domain_.inner_radius;
    const double a2 = domain_.outer_radius;
    for (int j = ring_first(); j <= ring_last(); ++j) {
      const double r = ring_radius(j);
      const double r_in = std::max(r - 0.5 * dr_, a1);
      const double r_out = std::min(r + 0.5 * dr_, a2);
      const double cell = 0.5 * (r_out * r_out - r_in * r_in) * dphi_;
      const bool bdry = (j == n_r_) || (domain_.is_annulus() && j == 0);
      for (int k = 0; k < n_theta_; ++k) {
        const std::size_t i = node_index(j, k);
        const double phi = node_angle(k);
        r_[i] = r;
        phi_[i] = phi;
        x_[i] = r * std::cos(phi);
        y_[i] = r * std::sin(phi);
        w_[i] = cell;
        boundary_[i] = bdry ? 1 : 0;
      }
    }
    interior_count_ = 0;
    for (std::size_t i = 0; i < nodes_; ++i)
      if (!boundary_[i]) ++interior_count_;
  }

  DomainSpec domain_;
  int n_r_;
  int n_theta_;
  double dr_;
  double dphi_;
  std::size_t nodes_ = 0;
  std::size_t origin_offset_ = 0;
  std::size_t interior_count_ = 0;
  std::vector<double> x_, y_, r_, phi_, w_;
  std::vector<std::uint8_t> boundary_;
};

/// Direction at angle m * pi / n_theta.  Reflections across these (and only
/// these) axes map grid angles onto grid angles exactly.
inline Direction grid_aligned_direction(const PolarGrid& grid, int m) {
  return Direction(m * std::numbers::pi / grid.n_theta());
}

inline bool is_grid_aligned(const PolarGrid& grid, Direction e, double tol = 1e-9) {
  const double s = 2.0 * e.angle / grid.dphi();
  return std::abs(s - std::round(s)) < tol;
}

/// Node-level realization of sigma_e.  For grid-aligned e the map is an
/// exact index permutation; otherwise each node maps to a pair of angular
/// neighbors on its ring with linear interpolation weights.
class ReflectionMap {
 public:
  ReflectionMap(const PolarGrid& grid, Direction e) : grid_(&grid), e_(e) {
    const int n = grid.n_theta();
    // phi -> 2*psi + pi - phi, reflection across the line H(e).
    const double shift = (2.0 * e.angle + std::numbers::pi) / grid.dphi();
    exact_ = std::abs(shift - std::round(shift)) < 1e-9;
    k_target_.resize(n);
    k_weight_.resize(n);
    const long s_int = static_cast<long>(std::llround(shift));
    for (int k = 0; k < n; ++k) {
      if (exact_) {
        long kk = (s_int - k) % n;
        if (kk < 0) kk += n;
        k_target_[k] = static_cast<int>(kk);
        k_weight_[k] = 0.0;
      } else {
        double kr = shift - k;
        kr = std::fmod(kr, static_cast<double>(n));
        if (kr < 0) kr += n;
        const int k0 = static_cast<int>(kr);  // floor for kr >= 0
        k_target_[k] = k0 % n;
        k_weight_[k] = kr - k0;
      }
    }
  }

  bool exact() const { return exact_; }
  Direction direction() const { return e_; }

  /// Image node index; valid only for exact maps.
  std::size_t permuted(std::size_t i) const {
    if (!exact_) throw std::logic_error("ReflectionMap: permutation requires an exact map");
    if (grid_->is_origin(i)) return i;
    const int j = grid_->ring_of(i);
    const int k = grid_->angle_index_of(i);
    return grid_->node_index(j, k_target_[k]);
  }

  /// Values of f(sigma_e(x)) at every node.
  std::vector<double> apply(const std::vector<double>& f) const {
    if (f.size() != grid_->node_count())
      throw std::invalid_argument("ReflectionMap::apply: size mismatch");
    std::vector<double> out(f.size());
    if (grid_->has_origin()) out[0] = f[0];
    const int n = grid_->n_theta();
    for (int j = grid_->ring_first(); j <= grid_->ring_last(); ++j) {
      const std::size_t base = grid_->node_index(j, 0);
      for (int k = 0; k < n; ++k) {
        const int k0 = k_target_[k];
        if (exact_) {
          out[base + k] = f[base + k0];
        } else {
          const double w = k_weight_[k];
          out[base + k] = (1.0 - w) * f[base + k0] + w * f[base + (k0 + 1) % n];
        }
      }
    }
    return out;
  }

 private:
  const PolarGrid* grid_;
  Direction e_;
  bool exact_ = false;
  std::vector<int> k_target_;
  std::vector<double> k_weight_;
};

/// Boolean mask of B(e) = {x.e > 0}.  Strict inequality: nodes on H(e) are
/// excluded, so mask(e) and mask(-e) are disjoint.
inline std::vector<std::uint8_t> half_domain_mask(const PolarGrid& grid, Direction e) {
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  const double ex = e.ex(), ey = e.ey();
  const double tol = 1e-13 * grid.domain().outer_radius;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Point p = grid.position(i);
    mask[i] = (p.x * ex + p.y * ey > tol) ? 1 : 0;
  }
  return mask;
}

/// Orthonormal frame at a corner x* of the half domain, i.e. a point of
/// dB meeting H(e).  nu is the inward normal of dB; s and s~ are the
/// diagonal directions (nu + e)/sqrt(2) and (-nu + e)/sqrt(2).
struct CornerFrame {
  Point corner;
  Point normal;   // inward
  Point s;
  Point s_tilde;
  bool inner_ring = false;
};

inline std::vector<CornerFrame> corner_frames(const PolarGrid& grid, Direction e) {
  std::vector<CornerFrame> frames;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const Point ev = e.vec();
  // dB cap H(e): the two (disk) or four (annulus) points at angle +-pi/2 from e.
  for (const double side : {0.5 * std::numbers::pi, -0.5 * std::numbers::pi}) {
    const double beta = e.angle + side;
    const Point u{std::cos(beta), std::sin(beta)};
    const double a2 = grid.domain().outer_radius;
    CornerFrame outer;
    outer.corner = a2 * u;
    outer.normal = -1.0 * u;  // toward the center
    outer.s = inv_sqrt2 * (outer.normal + ev);
    outer.s_tilde = inv_sqrt2 * (-1.0 * outer.normal + ev);
    frames.push_back(outer);
    if (grid.domain().is_annulus()) {
      const double a1 = grid.domain().inner_radius;
      CornerFrame inner;
      inner.corner = a1 * u;
      inner.normal = u;  // away from the center, into the annulus
      inner.s = inv_sqrt2 * (inner.normal + ev);
      inner.s_tilde = inv_sqrt2 * (-1.0 * inner.normal + ev);
      inner.inner_ring = true;
      frames.push_back(inner);
    }
  }
  return frames;
}

/// dist(x, dB) per node.
inline std::vector<double> boundary_distance_field(const PolarGrid& grid) {
  std::vector<double> d(grid.node_count());
  for (std::size_t i = 0; i < grid.node_count(); ++i) d[i] = grid.boundary_distance(i);
  return d;
}

/// Mask of the delta-neighborhood [A]_delta = {dist(x, A) <= delta} for a
/// finite point set A.
inline std::vector<std::uint8_t> near_points_mask(const PolarGrid& grid,
                                                  const std::vector<Point>& pts,
                                                  double delta) {
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Point p = grid.position(i);
    for (const Point& q : pts) {
      if ((p - q).norm() <= delta) {
        mask[i] = 1;
        break;
      }
    }
  }
  return mask;
}

}  // namespace rdsym
