#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdsym/field.hpp"
#include "rdsym/radial.hpp"

namespace rdsym {

enum class ProfileClass { Coexistence, Semitrivial1, Semitrivial2, Trivial };

inline const char* to_string(ProfileClass c) {
  switch (c) {
    case ProfileClass::Coexistence: return "coexistence";
    case ProfileClass::Semitrivial1: return "semitrivial_1";
    case ProfileClass::Semitrivial2: return "semitrivial_2";
    case ProfileClass::Trivial: return "trivial";
  }
  return "?";
}

/// Species i counts as extinct when ||z_i|| < tol * max(1, ||z_j||).
/// semitrivial_k means species k survives.
inline ProfileClass classify_profile(const ScalarField& z1, const ScalarField& z2,
                                     double extinction_tol = 1e-4) {
  const double n1 = z1.max_abs();
  const double n2 = z2.max_abs();
  const bool dead1 = n1 < extinction_tol * std::max(1.0, n2);
  const bool dead2 = n2 < extinction_tol * std::max(1.0, n1);
  if (dead1 && dead2) return ProfileClass::Trivial;
  if (dead1) return ProfileClass::Semitrivial2;
  if (dead2) return ProfileClass::Semitrivial1;
  return ProfileClass::Coexistence;
}

struct LimitRepresentative {
  Snapshot snapshot;       // latest member of its cluster
  double cluster_radius = 0.0;
  std::size_t members = 0;
  ProfileClass classification = ProfileClass::Trivial;
};

/// Clustered tail snapshots standing in for the omega limit set, plus a
/// convergence indicator (the tail's max pairwise sup distance).  The
/// indicator is reported, not asserted: a periodically forced run keeps a
/// nontrivial tail diameter and simply yields several representatives.
struct LimitProfileSet {
  std::vector<LimitRepresentative> representatives;
  double convergence_indicator = 0.0;
  double tail_t_begin = 0.0;
  std::size_t tail_snapshots = 0;
};

namespace detail {
inline double snapshot_distance(const Snapshot& a, const Snapshot& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.u1.size(); ++i) {
    m = std::max(m, std::abs(a.u1.v[i] - b.u1.v[i]));
    m = std::max(m, std::abs(a.u2.v[i] - b.u2.v[i]));
  }
  return m;
}
}  // namespace detail

/// Greedy sup-distance clustering of the tail window, processed latest
/// first so each representative is its cluster's latest member.
inline LimitProfileSet extract_limit_profiles(const Trajectory& traj, double tail_fraction,
                                              double cluster_tol,
                                              double extinction_tol = 1e-4) {
  if (traj.snapshots.empty()) throw std::invalid_argument("extract_limit_profiles: empty trajectory");
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
    throw std::invalid_argument("extract_limit_profiles: tail_fraction must lie in (0, 1]");
  const double t0 = traj.t_begin();
  const double t1 = traj.t_end();
  const double t_cut = t1 - tail_fraction * (t1 - t0);

  std::vector<const Snapshot*> tail;
  for (const Snapshot& s : traj.snapshots)
    if (s.t >= t_cut) tail.push_back(&s);
  if (tail.size() < 8)
    throw std::invalid_argument("extract_limit_profiles: need at least 8 tail snapshots, have " +
                                std::to_string(tail.size()));

  LimitProfileSet out;
  out.tail_t_begin = t_cut;
  out.tail_snapshots = tail.size();
  for (std::size_t i = 0; i < tail.size(); ++i)
    for (std::size_t j = i + 1; j < tail.size(); ++j)
      out.convergence_indicator =
          std::max(out.convergence_indicator, detail::snapshot_distance(*tail[i], *tail[j]));

  for (auto it = tail.rbegin(); it != tail.rend(); ++it) {
    bool assigned = false;
    for (LimitRepresentative& rep : out.representatives) {
      const double d = detail::snapshot_distance(rep.snapshot, **it);
      if (d <= cluster_tol) {
        rep.cluster_radius = std::max(rep.cluster_radius, d);
        ++rep.members;
        assigned = true;
        break;
      }
    }
    if (!assigned) {
      LimitRepresentative rep;
      rep.snapshot = **it;
      rep.members = 1;
      out.representatives.push_back(std::move(rep));
    }
  }
  for (LimitRepresentative& rep : out.representatives)
    rep.classification = classify_profile(rep.snapshot.u1, rep.snapshot.u2, extinction_tol);
  return out;
}

}  // namespace rdsym
