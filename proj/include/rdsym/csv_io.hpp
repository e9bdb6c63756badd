#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdsym/field.hpp"
#include "rdsym/radial.hpp"

namespace rdsym {

namespace detail {
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Writes one snapshot as CSV with header r,phi,u1,u2, row-major over rings
/// then angles (a disk's origin row comes first).
inline void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snap) {
  const PolarGrid& g = *snap.u1.grid;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot_csv: cannot open " + path.string());
  out << "r,phi,u1,u2\n";
  auto row = [&](std::size_t i) {
    out << detail::format_double(g.radius(i)) << ',' << detail::format_double(g.angle(i)) << ','
        << detail::format_double(snap.u1.v[i]) << ',' << detail::format_double(snap.u2.v[i])
        << '\n';
  };
  if (g.has_origin()) row(g.origin_index());
  for (int j = g.ring_first(); j <= g.ring_last(); ++j)
    for (int k = 0; k < g.n_theta(); ++k) row(g.node_index(j, k));
  if (!out) throw std::runtime_error("write_snapshot_csv: write failed for " + path.string());
}

/// Reads a snapshot CSV back onto the given grid, validating coordinates.
inline Snapshot read_snapshot_csv(const std::filesystem::path& path, const GridPtr& grid,
                                  double t = 0.0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_snapshot_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("r,phi,u1,u2", 0) != 0)
    throw std::runtime_error("read_snapshot_csv: bad header in " + path.string());

  Snapshot snap{t, ScalarField(grid, 0.0, t), ScalarField(grid, 0.0, t)};
  const PolarGrid& g = *grid;
  std::vector<std::size_t> order;
  if (g.has_origin()) order.push_back(g.origin_index());
  for (int j = g.ring_first(); j <= g.ring_last(); ++j)
    for (int k = 0; k < g.n_theta(); ++k) order.push_back(g.node_index(j, k));

  const double coord_tol = 1e-9 * g.domain().outer_radius;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (!std::getline(in, line))
      throw std::runtime_error("read_snapshot_csv: too few rows in " + path.string());
    std::istringstream ss(line);
    double r, phi, u1, u2;
    char comma;
    if (!(ss >> r >> comma >> phi >> comma >> u1 >> comma >> u2))
      throw std::runtime_error("read_snapshot_csv: bad row " + std::to_string(n + 2));
    const std::size_t i = order[n];
    if (std::abs(r - g.radius(i)) > coord_tol || std::abs(phi - g.angle(i)) > 1e-9)
      throw std::runtime_error("read_snapshot_csv: grid mismatch at row " + std::to_string(n + 2));
    snap.u1.v[i] = u1;
    snap.u2.v[i] = u2;
  }
  return snap;
}

/// snap_000042_t12.500000.csv style name; timestamps are also recorded in
/// the manifest with full precision.
inline std::string snapshot_filename(std::size_t index, double t) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "snap_%06zu_t%.6f.csv", index, t);
  return buf;
}

/// SteadyProfile export as two-column CSV (r, z).
inline void write_radial_csv(const std::filesystem::path& path, const RadialProfile& prof) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_radial_csv: cannot open " + path.string());
  out << "r,z\n";
  for (int j = 0; j <= prof.n_r; ++j)
    out << detail::format_double(prof.radius(j)) << ',' << detail::format_double(prof.values[j])
        << '\n';
}

}  // namespace rdsym
