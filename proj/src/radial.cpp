#include "frostdecay/radial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace frostdecay {

namespace {

// Exponent plus two mantissa bits: four bins per octave, monotone in d > 0.
std::uint64_t bin_key(double d) { return std::bit_cast<std::uint64_t>(d) >> 50; }

constexpr std::uint64_t kMaxBins = 1u << 16;

struct Bin {
  CompensatedSum mass;
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  std::size_t count = 0;
};

class Tracker {
 public:
  Tracker(double exponent, double inflate) : exponent_(exponent), inflate_(inflate) {}

  // Ratio at r = d - inflate for a ball of mass `mass`.
  void offer_jump(double d, double mass) { offer(d - inflate_, mass); }

  void offer(double r, double mass) {
    const double v = mass / std::pow(r, exponent_);
    if (!best_.admissible || v > best_.value || (v == best_.value && r < best_.radius)) {
      best_.value = v;
      best_.radius = r;
      best_.mass = mass;
      best_.admissible = true;
    }
  }

  double bound(double r, double mass) const { return mass / std::pow(r, exponent_); }
  const RatioSup& best() const { return best_; }

 private:
  double exponent_;
  double inflate_;
  RatioSup best_;
};

}  // namespace

RatioSup sup_ball_ratio(const AtomicMeasure& mu, std::span<const double> center, double exponent,
                        double inflate, double r_lo, double r_hi) {
  if (center.size() != mu.dim()) throw std::invalid_argument("centre arity mismatch");
  if (!(r_lo > 0.0)) throw std::invalid_argument("radius window must start above zero");
  if (!(exponent >= 0.0) || !(inflate >= 0.0)) {
    throw std::invalid_argument("exponent and inflation must be non-negative");
  }
  if (r_hi < r_lo) return {};

  const double rho_lo = r_lo + inflate;
  const double rho_hi = r_hi + inflate;

  std::vector<double> dist(mu.size());
  CompensatedSum base;
  double dmax_all = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = distance(mu.position(i), center);
    dist[i] = d;
    if (d <= rho_lo) {
      base.add(mu.mass(i));
    } else if (d <= rho_hi) {
      dmax_all = std::max(dmax_all, d);
    }
  }

  Tracker tracker(exponent, inflate);
  tracker.offer(r_lo, base.value());
  if (dmax_all == 0.0) return tracker.best();

  const std::uint64_t key0 = bin_key(rho_lo);
  const std::uint64_t nbins = bin_key(dmax_all) - key0 + 1;

  auto in_window = [&](double d) { return d > rho_lo && d <= rho_hi; };

  if (nbins > kMaxBins) {
    // Degenerate window spanning thousands of octaves: plain sorted sweep.
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (in_window(dist[i])) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    CompensatedSum cum = base;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      cum.add(mu.mass(idx[k]));
      if (k + 1 == idx.size() || dist[idx[k + 1]] != dist[idx[k]]) {
        tracker.offer_jump(dist[idx[k]], cum.value());
      }
    }
    return tracker.best();
  }

  std::vector<Bin> bins(nbins);
  std::vector<std::uint32_t> bin_of(mu.size(), 0);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double d = dist[i];
    if (!in_window(d)) continue;
    const auto b = static_cast<std::uint32_t>(bin_key(d) - key0);
    bin_of[i] = b;
    Bin& bin = bins[b];
    bin.mass.add(mu.mass(i));
    bin.dmin = std::min(bin.dmin, d);
    bin.dmax = std::max(bin.dmax, d);
    ++bin.count;
  }

  // Exact ratio at the right end of every occupied bin gives a lower bound.
  std::vector<double> cum_before(nbins);
  double lower = tracker.best().value;
  {
    CompensatedSum cum = base;
    for (std::size_t b = 0; b < nbins; ++b) {
      cum_before[b] = cum.value();
      if (bins[b].count == 0) continue;
      cum.add(bins[b].mass.value());
      lower = std::max(lower, tracker.bound(bins[b].dmax - inflate, cum.value()));
    }
  }

  // Group atoms by bin only for the bins that need resolving.
  std::vector<char> refine(nbins, 0);
  for (std::size_t b = 0; b < nbins; ++b) {
    if (bins[b].count == 0) continue;
    const double r_low = std::max(r_lo, bins[b].dmin - inflate);
    const double upper = tracker.bound(r_low, cum_before[b] + bins[b].mass.value());
    // Relative margin absorbs the rounding gap between the two summation orders.
    refine[b] = bins[b].count > 1 && upper >= lower * (1.0 - 1e-12);
  }
  std::vector<std::vector<std::size_t>> members(nbins);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (in_window(dist[i]) && refine[bin_of[i]]) members[bin_of[i]].push_back(i);
  }

  for (std::size_t b = 0; b < nbins; ++b) {
    const Bin& bin = bins[b];
    if (bin.count == 0) continue;
    if (!refine[b]) {
      CompensatedSum cum;
      cum.add(cum_before[b]);
      cum.add(bin.mass.value());
      tracker.offer_jump(bin.dmax, cum.value());
      continue;
    }
    auto& idx = members[b];
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return dist[x] < dist[y]; });
    CompensatedSum cum;
    cum.add(cum_before[b]);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      cum.add(mu.mass(idx[k]));
      if (k + 1 == idx.size() || dist[idx[k + 1]] != dist[idx[k]]) {
        tracker.offer_jump(dist[idx[k]], cum.value());
      }
    }
  }
  return tracker.best();
}

namespace {

constexpr std::uint32_t kLeafSize = 16;
// Box distances are widened by this factor before binning so that every
// atom of a node placed in a bin computes to a distance inside that bin.
constexpr double kPad = 1e-12;
constexpr double kPruneMargin = 1e-9;

}  // namespace

BallTree::BallTree(AtomicMeasure mu) : mu_(std::move(mu)) {
  const std::size_t n = mu_.size();
  if (n > std::numeric_limits<std::uint32_t>::max() / 2) throw std::length_error("too many atoms for the tree");
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  if (n > 0) build(0, static_cast<std::uint32_t>(n));
  const std::size_t dim = mu_.dim();
  coords_.reserve(n * dim);
  masses_.reserve(n);
  for (std::uint32_t i : order_) {
    const auto p = mu_.position(i);
    coords_.insert(coords_.end(), p.begin(), p.end());
    masses_.push_back(mu_.mass(i));
  }
}

std::int32_t BallTree::build(std::uint32_t begin, std::uint32_t end) {
  const std::size_t dim = mu_.dim();
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, 0.0});
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  CompensatedSum mass;
  for (std::uint32_t k = begin; k < end; ++k) {
    const auto p = mu_.position(order_[k]);
    for (std::size_t a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
    mass.add(mu_.mass(order_[k]));
  }
  nodes_[id].mass = mass.value();
  boxes_.insert(boxes_.end(), lo.begin(), lo.end());
  boxes_.insert(boxes_.end(), hi.begin(), hi.end());
  if (end - begin <= kLeafSize) return id;

  std::size_t axis = 0;
  for (std::size_t a = 1; a < dim; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t x, std::uint32_t y) {
                     const double px = mu_.position(x)[axis];
                     const double py = mu_.position(y)[axis];
                     return px < py || (px == py && x < y);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void BallTree::box_distances(std::size_t node, std::span<const double> x, double& dmin,
                             double& dmax) const {
  const std::size_t dim = x.size();
  const double* lo = boxes_.data() + node * 2 * dim;
  const double* hi = lo + dim;
  double near = 0.0, far = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double below = lo[a] - x[a];
    const double above = x[a] - hi[a];
    const double gap = std::max({below, above, 0.0});
    const double reach = std::max(std::abs(x[a] - lo[a]), std::abs(x[a] - hi[a]));
    near += gap * gap;
    far += reach * reach;
  }
  dmin = std::sqrt(near);
  dmax = std::sqrt(far);
}

RatioSup BallTree::sup_ball_ratio(std::span<const double> center, double exponent, double inflate,
                                  double r_lo, double r_hi, double floor) const {
  if (center.size() != mu_.dim()) throw std::invalid_argument("centre arity mismatch");
  if (!(r_lo > 0.0)) throw std::invalid_argument("radius window must start above zero");
  if (!(exponent >= 0.0) || !(inflate >= 0.0)) {
    throw std::invalid_argument("exponent and inflation must be non-negative");
  }
  if (r_hi < r_lo) return {};

  const double rho_lo = r_lo + inflate;
  const double rho_hi = r_hi + inflate;
  Tracker tracker(exponent, inflate);
  if (nodes_.empty()) {
    tracker.offer(r_lo, 0.0);
    return tracker.best();
  }
  double root_lo = 0.0, root_hi = 0.0;
  box_distances(0, center, root_lo, root_hi);
  const double top = std::min(rho_hi, root_hi * (1.0 + 1e-9));
  const std::uint64_t key0 = bin_key(rho_lo);
  if (top > rho_lo && bin_key(top) - key0 + 1 > kMaxBins) {
    return frostdecay::sup_ball_ratio(mu_, center, exponent, inflate, r_lo, r_hi);
  }

  struct Shell {
    CompensatedSum mass;
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    std::size_t count = 0;
  };
  std::vector<Shell> shells;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> node_tags;  // (shell, node)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> atom_tags;  // (shell, slot)
  std::vector<double> atom_dist;
  CompensatedSum base;
  auto shell_of = [&](double d) {
    const auto b = static_cast<std::size_t>(bin_key(d) - key0);
    if (b >= shells.size()) shells.resize(b + 1);
    return b;
  };

  const std::size_t dim = center.size();
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const auto id = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    const Node& node = nodes_[id];
    double lo = 0.0, hi = 0.0;
    box_distances(id, center, lo, hi);
    const double lo_pad = lo * (1.0 - kPad);
    const double hi_pad = hi * (1.0 + kPad);
    if (lo_pad > rho_hi) continue;
    if (hi_pad <= rho_lo) {
      base.add(node.mass);
      continue;
    }
    if (lo_pad > rho_lo && hi_pad <= rho_hi && bin_key(lo_pad) == bin_key(hi_pad)) {
      const std::size_t b = shell_of(lo_pad);
      Shell& sh = shells[b];
      sh.mass.add(node.mass);
      sh.dmin = std::min(sh.dmin, lo);
      sh.dmax = std::max(sh.dmax, hi);
      sh.count += node.end - node.begin;
      node_tags.emplace_back(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(id));
      continue;
    }
    if (node.left < 0) {
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        const double d = distance({coords_.data() + k * dim, dim}, center);
        if (d <= rho_lo) {
          base.add(masses_[k]);
        } else if (d <= rho_hi) {
          const std::size_t b = shell_of(d);
          Shell& sh = shells[b];
          sh.mass.add(masses_[k]);
          sh.dmin = std::min(sh.dmin, d);
          sh.dmax = std::max(sh.dmax, d);
          ++sh.count;
          atom_tags.emplace_back(static_cast<std::uint32_t>(b), k);
          atom_dist.push_back(d);
        }
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }

  tracker.offer(r_lo, base.value());
  const std::size_t nb = shells.size();
  std::vector<double> before(nb), upper(nb);
  double level = std::max(floor, tracker.best().value);
  {
    CompensatedSum cum = base;
    for (std::size_t b = 0; b < nb; ++b) {
      before[b] = cum.value();
      if (shells[b].count == 0) continue;
      cum.add(shells[b].mass.value());
      const double after = cum.value();
      upper[b] = tracker.bound(std::max(shells[b].dmin - inflate, r_lo), after);
      level = std::max(level, tracker.bound(shells[b].dmax - inflate, after));
    }
  }

  std::vector<std::size_t> todo;
  for (std::size_t b = 0; b < nb; ++b) {
    if (shells[b].count > 0 && upper[b] >= level * (1.0 - kPruneMargin)) todo.push_back(b);
  }
  if (todo.empty()) return tracker.best();
  std::stable_sort(todo.begin(), todo.end(), [&](std::size_t a, std::size_t b) { return upper[a] > upper[b]; });

  std::vector<std::size_t> atom_order(atom_tags.size());
  std::iota(atom_order.begin(), atom_order.end(), 0);
  std::stable_sort(atom_order.begin(), atom_order.end(),
                   [&](std::size_t a, std::size_t b) { return atom_tags[a].first < atom_tags[b].first; });
  std::stable_sort(node_tags.begin(), node_tags.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::pair<double, double>> ring;  // (distance, mass)
  for (std::size_t b : todo) {
    const double bar = std::max(level, tracker.best().value) * (1.0 - kPruneMargin);
    if (upper[b] < bar) break;
    ring.clear();
    auto a_it = std::lower_bound(atom_order.begin(), atom_order.end(), b,
                                 [&](std::size_t i, std::size_t key) { return atom_tags[i].first < key; });
    for (; a_it != atom_order.end() && atom_tags[*a_it].first == b; ++a_it) {
      ring.emplace_back(atom_dist[*a_it], masses_[atom_tags[*a_it].second]);
    }
    auto n_it = std::lower_bound(node_tags.begin(), node_tags.end(), b,
                                 [](const auto& t, std::size_t key) { return t.first < key; });
    for (; n_it != node_tags.end() && n_it->first == b; ++n_it) {
      const Node& node = nodes_[n_it->second];
      for (std::uint32_t k = node.begin; k < node.end; ++k) {
        ring.emplace_back(distance({coords_.data() + k * dim, dim}, center), masses_[k]);
      }
    }
    std::sort(ring.begin(), ring.end());
    CompensatedSum cum;
    cum.add(before[b]);
    for (std::size_t k = 0; k < ring.size(); ++k) {
      cum.add(ring[k].second);
      if (k + 1 == ring.size() || ring[k + 1].first != ring[k].first) {
        tracker.offer_jump(ring[k].first, cum.value());
      }
    }
  }
  return tracker.best();
}

std::vector<RadialStep> radial_profile(const AtomicMeasure& mu, std::span<const double> center,
                                       double r_hi) {
  if (center.size() != mu.dim()) throw std::invalid_argument("centre arity mismatch");
  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = distance(mu.position(i), center);
    if (d <= r_hi) near.emplace_back(d, i);
  }
  std::sort(near.begin(), near.end());
  std::vector<RadialStep> steps;
  CompensatedSum cum;
  for (std::size_t k = 0; k < near.size(); ++k) {
    cum.add(mu.mass(near[k].second));
    if (k + 1 == near.size() || near[k + 1].first != near[k].first) {
      steps.push_back({near[k].first, cum.value()});
    }
  }
  return steps;
}

}  // namespace frostdecay
