#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fdmimo/params.hpp"
#include "fdmimo/rng.hpp"
#include "fdmimo/types.hpp"

namespace fdmimo {

struct Region {
  enum class Kind { Disc, Rect };
  Kind kind = Kind::Disc;
  Point2 center{0.0, 0.0};
  double radius_m = 0.0;  // Disc
  double xmin_m = 0.0, xmax_m = 0.0, ymin_m = 0.0, ymax_m = 0.0;  // Rect

  static Region disc(const Point2& center, double radius_m);
  static Region rect(double xmin_m, double xmax_m, double ymin_m,
                     double ymax_m);

  double area_m2() const;
  bool contains(const Point2& p) const;
  // Uniform point inside the region (rejection from the bounding box).
  Point2 sample(RngStream& rng) const;
};

enum class LayoutKind { HexLattice, Ppp, Custom };

struct NetworkLayout {
  LayoutKind kind = LayoutKind::Custom;
  std::vector<Point2> bs_positions;
  Region region;
  int tiers = 0;                  // HexLattice only
  double intensity_per_m2 = 0.0;  // Ppp only

  int n_bs() const { return int(bs_positions.size()); }
};

struct UserDrop {
  std::vector<Point2> uplink_users;
  std::vector<Point2> downlink_users;
  // Cell each user belongs to: the nearest BS from drop_users, or the
  // serving BS when a scenario builder conditioned the drop on shadowed
  // association.
  std::vector<int> cell_of_uplink;
  std::vector<int> cell_of_downlink;
  std::vector<int> k_u_per_cell;
  std::vector<int> k_d_per_cell;

  int n_uplink() const { return int(uplink_users.size()); }
  int n_downlink() const { return int(downlink_users.size()); }
};

struct AssociationMap {
  std::vector<int> bs_index;
  std::vector<double> gain;  // linear gain to the serving BS
};

// Hex lattice with the center BS at the origin, nearest-neighbor spacing
// sqrt(3) * cell_radius, and 1 + 3t(t+1) BSs for t tiers. The region is the
// disc bounding the lattice plus one cell radius of margin.
NetworkLayout build_hex_lattice(int tiers, double cell_radius_m);

// Poisson point process over region; BS 0 is the point closest to the region
// center so downstream "cell of interest" logic stays meaningful.
NetworkLayout build_ppp_layout(double intensity_per_m2, const Region& region,
                               std::uint64_t seed);

// Fixed BS positions supplied by the caller (test scaffolding, replays).
NetworkLayout make_custom_layout(std::vector<Point2> bs_positions,
                                 const Region& region);

int nearest_bs(const NetworkLayout& layout, const Point2& p);

// Uniform users per cell, conditioned on landing in their cell's Voronoi
// region and at least d_min from every BS, so per-cell counts are exact.
UserDrop drop_users(const NetworkLayout& layout, int k_u, int k_d,
                    double d_min_m, std::uint64_t seed);

// Highest-gain association under per-(BS, user) shadowing chi (n_bs x n_users,
// linear). Ties break to the lowest BS index.
AssociationMap associate(const NetworkLayout& layout,
                         const std::vector<Point2>& users,
                         const SystemParams& params, const RMatrix& chi);

// CSV exports: "bs_id,x_m,y_m" and "ue_id,link,x_m,y_m,bs_id".
void write_layout_csv(std::ostream& out, const NetworkLayout& layout);
void write_users_csv(std::ostream& out, const UserDrop& drop);

}  // namespace fdmimo
