#include "frostdecay/frostman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "frostdecay/parallel.hpp"
#include "frostdecay/radial.hpp"

namespace frostdecay {

namespace {

void check_exponent(const CubeSet& set, double s) {
  if (set.empty()) throw std::invalid_argument("Frostman construction needs a nonempty set");
  if (!(s > 0.0 && s < static_cast<double>(set.dim()))) {
    throw std::invalid_argument("Frostman exponent s must lie in (0, n), got " + std::to_string(s));
  }
}

// Relevant cubes (those meeting S) level by level, with child links.
struct CoverTree {
  std::vector<std::vector<CubeIndex>> nodes;                     // per level, sorted
  std::vector<std::vector<std::vector<std::size_t>>> children;  // per level, per node

  explicit CoverTree(const CubeSet& set) {
    const int L = set.level();
    nodes.resize(L + 1);
    children.resize(L + 1);
    for (int j = 0; j <= L; ++j) nodes[j] = set.coarsen(j).members();
    for (int j = 0; j < L; ++j) {
      children[j].resize(nodes[j].size());
      for (std::size_t c = 0; c < nodes[j + 1].size(); ++c) {
        CubeIndex parent = nodes[j + 1][c];
        for (auto& i : parent) i = shift_down(i, 1);
        const auto it = std::lower_bound(nodes[j].begin(), nodes[j].end(), parent);
        children[j][static_cast<std::size_t>(it - nodes[j].begin())].push_back(c);
      }
    }
    children[L].resize(nodes[L].size());
  }
};

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return b > std::numeric_limits<std::size_t>::max() - a ? std::numeric_limits<std::size_t>::max()
                                                         : a + b;
}

class CoverSearch {
 public:
  CoverSearch(const CoverTree& tree, double s) : tree_(tree), count_per_level_(tree.nodes.size()) {
    for (std::size_t j = 0; j < tree.nodes.size(); ++j) {
      cost_per_level_.push_back(std::exp2(-static_cast<double>(j) * s));
    }
    for (std::size_t r = 0; r < tree.nodes[0].size(); ++r) pending_.push_back({0, r});
  }

  void run() { descend(); }

  double best_value() const { return best_value_; }
  const std::vector<std::pair<int, std::size_t>>& best_cover() const { return best_cover_; }

 private:
  void descend() {
    if (pending_.empty()) {
      evaluate();
      return;
    }
    const auto node = pending_.back();
    pending_.pop_back();

    chosen_.push_back(node);
    ++count_per_level_[node.first];
    descend();
    --count_per_level_[node.first];
    chosen_.pop_back();

    if (static_cast<std::size_t>(node.first) + 1 < tree_.nodes.size()) {
      const auto& kids = tree_.children[node.first][node.second];
      for (auto c : kids) pending_.push_back({node.first + 1, c});
      descend();
      pending_.resize(pending_.size() - kids.size());
    }
    pending_.push_back(node);
  }

  void evaluate() {
    CompensatedSum v;
    for (std::size_t j = 0; j < count_per_level_.size(); ++j) {
      if (count_per_level_[j] != 0) v.add(static_cast<double>(count_per_level_[j]) * cost_per_level_[j]);
    }
    const double value = v.value();
    const bool tie = std::isfinite(best_value_) && std::abs(value - best_value_) <= 1e-12 * best_value_;
    if ((!tie && value < best_value_) || (tie && chosen_.size() < best_cover_.size())) {
      best_value_ = value;
      best_cover_ = chosen_;
    }
  }

  const CoverTree& tree_;
  std::vector<double> cost_per_level_;
  std::vector<std::size_t> count_per_level_;
  std::vector<std::pair<int, std::size_t>> pending_;
  std::vector<std::pair<int, std::size_t>> chosen_;
  double best_value_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, std::size_t>> best_cover_;
};

}  // namespace

AtomicMeasure greedy_frostman(const CubeSet& set, double s) {
  check_exponent(set, s);
  const int L = set.level();
  const std::size_t N = set.size();
  std::vector<double> mass(N, std::exp2(-static_cast<double>(L) * s));

  // keys[i] holds the level-j ancestor of member i as the sweep moves up.
  std::vector<CubeIndex> keys = set.members();
  std::vector<std::size_t> order(N);
  for (int j = L - 1; j >= 0; --j) {
    for (auto& k : keys) {
      for (auto& i : k) i = shift_down(i, 1);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    const double cap = std::exp2(-static_cast<double>(j) * s);
    for (std::size_t lo = 0; lo < N;) {
      std::size_t hi = lo;
      CompensatedSum total;
      while (hi < N && keys[order[hi]] == keys[order[lo]]) total.add(mass[order[hi++]]);
      if (total.value() > cap) {
        const double factor = cap / total.value();
        for (std::size_t k = lo; k < hi; ++k) mass[order[k]] *= factor;
      }
      lo = hi;
    }
  }
  return {set.dim(), set.centers(), std::move(mass), std::ldexp(1.0, -L)};
}

std::size_t count_antichain_covers(const CubeSet& set) {
  const CoverTree tree(set);
  const int L = set.level();
  std::vector<std::size_t> below(tree.nodes[L].size(), 1);
  for (int j = L - 1; j >= 0; --j) {
    std::vector<std::size_t> here(tree.nodes[j].size());
    for (std::size_t q = 0; q < here.size(); ++q) {
      std::size_t prod = 1;
      for (auto c : tree.children[j][q]) prod = saturating_mul(prod, below[c]);
      here[q] = saturating_add(prod, 1);
    }
    below = std::move(here);
  }
  std::size_t total = 1;
  for (auto c : below) total = saturating_mul(total, c);
  return total;
}

DyadicContent dyadic_content_bruteforce(const CubeSet& set, double s, std::size_t max_covers) {
  if (set.empty()) throw std::invalid_argument("dyadic content of an empty set");
  if (!(s > 0.0)) throw std::invalid_argument("content exponent must be positive");
  const std::size_t covers = count_antichain_covers(set);
  if (covers > max_covers) {
    throw std::length_error("brute-force content would enumerate " +
                            (covers == std::numeric_limits<std::size_t>::max()
                                 ? std::string("more than 2^64")
                                 : std::to_string(covers)) +
                            " covers (limit " + std::to_string(max_covers) + ")");
  }
  const CoverTree tree(set);
  CoverSearch search(tree, s);
  search.run();

  DyadicContent out;
  out.s = s;
  out.value = search.best_value();
  for (const auto& [level, id] : search.best_cover()) out.antichain.push_back({level, tree.nodes[level][id]});
  std::sort(out.antichain.begin(), out.antichain.end());
  return out;
}

NormalizedMeasure ball_growth_normalize(const AtomicMeasure& nu, double s,
                                        const PointSet& candidates, double delta) {
  if (nu.empty()) throw std::invalid_argument("cannot normalize an empty measure");
  if (candidates.empty()) throw std::invalid_argument("normalization needs candidate centres");
  if (candidates.dim() != nu.dim()) throw std::invalid_argument("candidate arity mismatch");
  if (!(s > 0.0)) throw std::invalid_argument("growth exponent must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("net spacing must be non-negative");

  const BallTree tree(nu);
  const auto best = argmax_over_centers(candidates, [&](std::span<const double> c, double floor) {
    return tree.sup_ball_ratio(c, s, delta, nu.r_min(), std::numeric_limits<double>::infinity(), floor);
  });
  const std::size_t arg = best->center;
  const RatioSup& top = best->sup;
  const double M = top.value;
  const auto ctr = candidates.point(arg);
  std::vector<double> masses = nu.masses();
  for (auto& m : masses) m /= M;
  return {nu.with_masses(std::move(masses)), M, {ctr.begin(), ctr.end()}, top.radius};
}

PointSet member_centers_with_origin(const CubeSet& set) {
  PointSet pts(set.dim(), set.centers());
  const std::vector<double> origin(set.dim(), 0.0);
  pts.push_back(origin);
  return pts;
}

}  // namespace frostdecay
