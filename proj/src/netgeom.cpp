#include "fdmimo/netgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fdmimo/channel.hpp"
#include "fdmimo/csvio.hpp"

namespace fdmimo {

namespace {

// Fixed stream ids so operations sharing a seed stay independent.
constexpr std::uint64_t kStreamPppLayout = 0x9e70'1a10ull;
constexpr std::uint64_t kStreamUserDrop = 0x9e70'd509ull;

constexpr int kMaxSlotRetries = 100000;

double sq_dist(const Point2& a, const Point2& b) {
  return (a - b).squaredNorm();
}

}  // namespace

Region Region::disc(const Point2& center, double radius_m) {
  if (!(radius_m > 0.0))
    throw std::invalid_argument("Region::disc: radius must be positive");
  Region r;
  r.kind = Kind::Disc;
  r.center = center;
  r.radius_m = radius_m;
  return r;
}

Region Region::rect(double xmin_m, double xmax_m, double ymin_m,
                    double ymax_m) {
  if (!(xmax_m > xmin_m) || !(ymax_m > ymin_m))
    throw std::invalid_argument("Region::rect: empty extent");
  Region r;
  r.kind = Kind::Rect;
  r.center = Point2((xmin_m + xmax_m) / 2, (ymin_m + ymax_m) / 2);
  r.xmin_m = xmin_m;
  r.xmax_m = xmax_m;
  r.ymin_m = ymin_m;
  r.ymax_m = ymax_m;
  return r;
}

double Region::area_m2() const {
  if (kind == Kind::Disc) return M_PI * radius_m * radius_m;
  return (xmax_m - xmin_m) * (ymax_m - ymin_m);
}

bool Region::contains(const Point2& p) const {
  if (kind == Kind::Disc) return sq_dist(p, center) <= radius_m * radius_m;
  return p.x() >= xmin_m && p.x() <= xmax_m && p.y() >= ymin_m &&
         p.y() <= ymax_m;
}

Point2 Region::sample(RngStream& rng) const {
  if (kind == Kind::Rect) {
    return {xmin_m + (xmax_m - xmin_m) * rng.uniform(),
            ymin_m + (ymax_m - ymin_m) * rng.uniform()};
  }
  // Rejection from the bounding square; acceptance ratio pi/4.
  for (;;) {
    const double x = (2.0 * rng.uniform() - 1.0) * radius_m;
    const double y = (2.0 * rng.uniform() - 1.0) * radius_m;
    if (x * x + y * y <= radius_m * radius_m)
      return {center.x() + x, center.y() + y};
  }
}

NetworkLayout build_hex_lattice(int tiers, double cell_radius_m) {
  if (tiers < 0)
    throw std::invalid_argument("build_hex_lattice: tiers must be >= 0");
  if (!(cell_radius_m > 0.0))
    throw std::invalid_argument(
        "build_hex_lattice: cell_radius must be positive");

  // Axial lattice coordinates (q, w) with max(|q|, |w|, |q+w|) <= tiers give
  // exactly 1 + 3t(t+1) sites; the basis has length sqrt(3) * cell_radius,
  // the distance between adjacent cell centers.
  const double d = std::sqrt(3.0) * cell_radius_m;
  const Point2 u1(d, 0.0);
  const Point2 u2(d / 2.0, d * std::sqrt(3.0) / 2.0);

  // Deterministic order: center outward by exact integer ring index
  // |q u1 + w u2|^2 = d^2 (q^2 + qw + w^2), counterclockwise within a ring.
  struct Site {
    int ring2;
    double angle;
    Point2 p;
  };
  std::vector<Site> sites;
  for (int q = -tiers; q <= tiers; ++q) {
    for (int w = -tiers; w <= tiers; ++w) {
      if (std::abs(q + w) > tiers) continue;
      const Point2 p = double(q) * u1 + double(w) * u2;
      sites.push_back({q * q + q * w + w * w, std::atan2(p.y(), p.x()), p});
    }
  }
  std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
    if (a.ring2 != b.ring2) return a.ring2 < b.ring2;
    return a.angle < b.angle;
  });
  std::vector<Point2> bs;
  bs.reserve(sites.size());
  for (const auto& s : sites) bs.push_back(s.p);

  NetworkLayout layout;
  layout.kind = LayoutKind::HexLattice;
  layout.bs_positions = std::move(bs);
  layout.tiers = tiers;
  layout.region =
      Region::disc({0.0, 0.0}, d * double(tiers) + cell_radius_m);
  return layout;
}

NetworkLayout build_ppp_layout(double intensity_per_m2, const Region& region,
                               std::uint64_t seed) {
  if (!(intensity_per_m2 > 0.0))
    throw std::invalid_argument(
        "build_ppp_layout: intensity must be positive");
  if (!(region.area_m2() > 0.0))
    throw std::invalid_argument("build_ppp_layout: degenerate region");

  RngStream rng(seed, kStreamPppLayout);

  // Poisson count by inversion: accumulate log-uniforms against -lambda*A.
  const double log_target = -intensity_per_m2 * region.area_m2();
  int n = 0;
  double acc = std::log(rng.uniform_pos());
  while (acc >= log_target) {
    ++n;
    acc += std::log(rng.uniform_pos());
  }

  std::vector<Point2> bs(n);
  for (int i = 0; i < n; ++i) bs[i] = region.sample(rng);

  // BS 0 is the point nearest the region center, keeping the "cell of
  // interest" near the middle where edge effects are smallest.
  if (n > 0) {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (sq_dist(bs[i], region.center) < sq_dist(bs[best], region.center))
        best = i;
    std::swap(bs[0], bs[best]);
  }

  NetworkLayout layout;
  layout.kind = LayoutKind::Ppp;
  layout.bs_positions = std::move(bs);
  layout.region = region;
  layout.intensity_per_m2 = intensity_per_m2;
  return layout;
}

NetworkLayout make_custom_layout(std::vector<Point2> bs_positions,
                                 const Region& region) {
  if (bs_positions.empty())
    throw std::invalid_argument("make_custom_layout: no BS positions");
  for (const auto& p : bs_positions)
    if (!region.contains(p))
      throw std::invalid_argument(
          "make_custom_layout: BS position outside region");
  NetworkLayout layout;
  layout.kind = LayoutKind::Custom;
  layout.bs_positions = std::move(bs_positions);
  layout.region = region;
  return layout;
}

int nearest_bs(const NetworkLayout& layout, const Point2& p) {
  if (layout.n_bs() == 0)
    throw std::invalid_argument("nearest_bs: empty layout");
  int best = 0;
  double best_d = sq_dist(p, layout.bs_positions[0]);
  for (int i = 1; i < layout.n_bs(); ++i) {
    const double d = sq_dist(p, layout.bs_positions[i]);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

UserDrop drop_users(const NetworkLayout& layout, int k_u, int k_d,
                    double d_min_m, std::uint64_t seed) {
  if (layout.n_bs() == 0)
    throw std::invalid_argument("drop_users: empty layout");
  if (k_u < 0 || k_d < 0)
    throw std::invalid_argument("drop_users: negative user count");
  if (d_min_m < 0.0)
    throw std::invalid_argument("drop_users: negative d_min");

  RngStream rng(seed, kStreamUserDrop);

  // A point is valid for cell c when c is its nearest BS and that nearest
  // distance is at least d_min (which bounds every other BS distance too).
  auto place_in_cell = [&](int cell) -> Point2 {
    for (int attempt = 0; attempt < kMaxSlotRetries; ++attempt) {
      const Point2 p = layout.region.sample(rng);
      const int c = nearest_bs(layout, p);
      if (c != cell) continue;
      if (sq_dist(p, layout.bs_positions[c]) >= d_min_m * d_min_m) return p;
    }
    throw std::runtime_error(
        "drop_users: could not place a user in its cell at distance >= d_min;"
        " region too small or d_min too large");
  };

  UserDrop drop;
  drop.k_u_per_cell.assign(layout.n_bs(), k_u);
  drop.k_d_per_cell.assign(layout.n_bs(), k_d);
  for (int c = 0; c < layout.n_bs(); ++c) {
    for (int i = 0; i < k_u; ++i) {
      drop.uplink_users.push_back(place_in_cell(c));
      drop.cell_of_uplink.push_back(c);
    }
  }
  for (int c = 0; c < layout.n_bs(); ++c) {
    for (int i = 0; i < k_d; ++i) {
      drop.downlink_users.push_back(place_in_cell(c));
      drop.cell_of_downlink.push_back(c);
    }
  }
  return drop;
}

AssociationMap associate(const NetworkLayout& layout,
                         const std::vector<Point2>& users,
                         const SystemParams& params, const RMatrix& chi) {
  const int n_bs = layout.n_bs();
  const int n_users = int(users.size());
  if (n_bs == 0) throw std::invalid_argument("associate: empty layout");
  if (chi.rows() != n_bs || chi.cols() != n_users)
    throw std::invalid_argument("associate: chi must be n_bs x n_users");

  AssociationMap map;
  map.bs_index.resize(n_users);
  map.gain.resize(n_users);
  for (int u = 0; u < n_users; ++u) {
    int best = 0;
    double best_gain = -1.0;
    for (int l = 0; l < n_bs; ++l) {
      const double r = std::sqrt(sq_dist(users[u], layout.bs_positions[l]));
      const double g = large_scale_gain(r, chi(l, u), params);
      // Strict > keeps ties on the lowest BS index.
      if (g > best_gain) {
        best = l;
        best_gain = g;
      }
    }
    map.bs_index[u] = best;
    map.gain[u] = best_gain;
  }
  return map;
}

void write_layout_csv(std::ostream& out, const NetworkLayout& layout) {
  write_csv_row(out, {"bs_id", "x_m", "y_m"});
  for (int i = 0; i < layout.n_bs(); ++i) {
    const auto& p = layout.bs_positions[i];
    write_csv_row(out, {std::to_string(i), format_double(p.x()),
                        format_double(p.y())});
  }
}

void write_users_csv(std::ostream& out, const UserDrop& drop) {
  write_csv_row(out, {"ue_id", "link", "x_m", "y_m", "bs_id"});
  for (int i = 0; i < drop.n_uplink(); ++i) {
    const auto& p = drop.uplink_users[i];
    write_csv_row(out, {std::to_string(i), "ul", format_double(p.x()),
                        format_double(p.y()),
                        std::to_string(drop.cell_of_uplink[i])});
  }
  for (int i = 0; i < drop.n_downlink(); ++i) {
    const auto& p = drop.downlink_users[i];
    write_csv_row(out, {std::to_string(drop.n_uplink() + i), "dl",
                        format_double(p.x()), format_double(p.y()),
                        std::to_string(drop.cell_of_downlink[i])});
  }
}

}  // namespace fdmimo
