#include "binpick/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binpick/error.hpp"

namespace binpick {

double grasp_distance(const Pose& a, const Pose& b, const GraspDistanceParams& w) {
  return (a.translation - b.translation).norm() + w.orientation_weight * rotation_angle(a.rotation, b.rotation);
}

double medoid_cost(std::size_t n, const std::vector<std::size_t>& medoids, const DistanceFn& dist) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : medoids) best = std::min(best, dist(i, m));
    total += best;
  }
  return total;
}

namespace {

class CachedDistance {
 public:
  CachedDistance(std::size_t n, const DistanceFn& fn) : n_(n), fn_(fn) {
    if (n_ > kMatrixLimit) return;
    matrix_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double d = fn_(i, j);
        matrix_[i * n_ + j] = d;
        matrix_[j * n_ + i] = d;
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (!matrix_.empty()) return matrix_[i * n_ + j];
    return i == j ? 0.0 : fn_(i, j);
  }

 private:
  std::size_t n_;
  const DistanceFn& fn_;
  std::vector<double> matrix_;
};

struct NearestCache {
  std::vector<std::size_t> nearest;  // position in medoid list
  std::vector<double> d_nearest;
  std::vector<double> d_second;
};

NearestCache nearest_medoids(std::size_t n, const std::vector<std::size_t>& medoids, const CachedDistance& d) {
  NearestCache c;
  c.nearest.assign(n, 0);
  c.d_nearest.assign(n, std::numeric_limits<double>::infinity());
  c.d_second.assign(n, std::numeric_limits<double>::infinity());
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t m = 0; m < medoids.size(); ++m) {
      const double dm = d(o, medoids[m]);
      if (dm < c.d_nearest[o]) {
        c.d_second[o] = c.d_nearest[o];
        c.d_nearest[o] = dm;
        c.nearest[o] = m;
      } else if (dm < c.d_second[o]) {
        c.d_second[o] = dm;
      }
    }
  }
  return c;
}

}  // namespace

PamResult pam_cluster(std::size_t n, std::size_t k, const DistanceFn& dist) {
  if (k < 1) throw DataError("pam: k must be >= 1");
  if (k > n) throw DataError("pam: k exceeds the number of items");
  const CachedDistance d(n, dist);

  // BUILD
  std::vector<std::size_t> medoids;
  std::vector<char> is_medoid(n, 0);
  std::vector<double> dn(n, std::numeric_limits<double>::infinity());
  {
    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      double sum = 0.0;
      for (std::size_t o = 0; o < n; ++o) sum += d(c, o);
      if (sum < best) {
        best = sum;
        first = c;
      }
    }
    medoids.push_back(first);
    is_medoid[first] = 1;
    for (std::size_t o = 0; o < n; ++o) dn[o] = d(o, first);
  }
  while (medoids.size() < k) {
    std::size_t pick = n;
    double best_gain = -1.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double gain = 0.0;
      for (std::size_t o = 0; o < n; ++o) gain += std::max(dn[o] - d(c, o), 0.0);
      if (gain > best_gain) {
        best_gain = gain;
        pick = c;
      }
    }
    medoids.push_back(pick);
    is_medoid[pick] = 1;
    for (std::size_t o = 0; o < n; ++o) dn[o] = std::min(dn[o], d(pick, o));
  }

  PamResult res;
  for (double v : dn) res.build_cost += v;
  double cost = res.build_cost;

  // SWAP
  std::vector<double> delta(k);
  for (;;) {
    const NearestCache nc = nearest_medoids(n, medoids, d);
    double best = 0.0;
    std::size_t best_m = 0, best_c = 0;
    bool found = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      std::fill(delta.begin(), delta.end(), 0.0);
      double shared = 0.0;
      for (std::size_t o = 0; o < n; ++o) {
        const double doc = d(c, o);
        const double gain_all = std::min(doc - nc.d_nearest[o], 0.0);
        shared += gain_all;
        // Removing o's nearest medoid sends o to c or to its second medoid.
        delta[nc.nearest[o]] += std::min(doc, nc.d_second[o]) - nc.d_nearest[o] - gain_all;
      }
      for (std::size_t m = 0; m < k; ++m) {
        const double dt = delta[m] + shared;
        const bool better = !found || dt < best ||
                            (dt == best && std::pair(medoids[m], c) < std::pair(medoids[best_m], best_c));
        if (better) {
          best = dt;
          best_m = m;
          best_c = c;
          found = true;
        }
      }
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(cost));
    if (!found || best >= -tol) break;
    is_medoid[medoids[best_m]] = 0;
    is_medoid[best_c] = 1;
    medoids[best_m] = best_c;
    cost += best;
    ++res.swaps;
  }

  std::sort(medoids.begin(), medoids.end());
  const NearestCache nc = nearest_medoids(n, medoids, d);
  res.medoids = medoids;
  res.assignment = nc.nearest;
  res.cost = 0.0;
  for (double v : nc.d_nearest) res.cost += v;
  return res;
}

GraspSet cluster_grasps(const GraspSet& set, std::size_t k, const GraspDistanceParams& w) {
  if (!(w.orientation_weight > 0.0)) throw DataError("orientation weight must be positive");
  if (set.grasps.empty()) throw DataError("cannot cluster an empty grasp set");
  const std::size_t kk = std::min(k, set.grasps.size());
  const auto& g = set.grasps;
  const PamResult r = pam_cluster(g.size(), kk, [&](std::size_t i, std::size_t j) {
    return grasp_distance(g[i].pose, g[j].pose, w);
  });
  GraspSet out;
  out.object_id = set.object_id;
  out.gripper = set.gripper;
  out.contact_pairs = set.contact_pairs;
  for (std::size_t m : r.medoids) {
    Grasp kept = g[m];
    kept.source_id = g[m].source_id >= 0 ? g[m].source_id : g[m].id;
    out.grasps.push_back(kept);
  }
  out.renumber();
  return out;
}

}  // namespace binpick
