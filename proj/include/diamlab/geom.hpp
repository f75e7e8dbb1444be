#pragma once

// Diameter (largest interpoint distance) of finite point sets in R^d.
//
// All kernels compare squared distances computed by the same scalar loop, so
// the pruned search returns a value bit-identical to the exhaustive one.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "diamlab/errors.hpp"

namespace diamlab {

using Eigen::Index;

/// A finite list of points in R^d stored column-wise, with cached Euclidean
/// norms and radial deficits 1 - |x|.
///
/// The radial deficit is carried separately because samplers know it exactly
/// (points on the sphere have deficit 0 even though their rounded coordinates
/// do not have norm exactly 1). diameter_deficit() relies on it.
template <typename Scalar>
class PointCloud {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit PointCloud(Index dim) : points_(dim, 0) {
    if (dim < 1) throw DomainError("point dimension must be >= 1");
  }

  explicit PointCloud(Matrix points) : points_(std::move(points)) {
    validate_points();
    compute_norms();
    radial_deficits_ = Vector::Ones(size()) - norms_;
  }

  PointCloud(Matrix points, Vector radial_deficits)
      : points_(std::move(points)), radial_deficits_(std::move(radial_deficits)) {
    validate_points();
    compute_norms();
    if (radial_deficits_.size() != size()) {
      throw DomainError("radial deficit count does not match point count");
    }
    for (Index i = 0; i < size(); ++i) {
      const Scalar eta = radial_deficits_[i];
      if (!std::isfinite(eta) || std::abs((Scalar(1) - eta) - norms_[i]) > Scalar(1e-9)) {
        throw DomainError("radial deficit inconsistent with point norm");
      }
    }
  }

  Index dim() const { return points_.rows(); }
  Index size() const { return points_.cols(); }
  bool empty() const { return points_.cols() == 0; }

  const Matrix& points() const { return points_; }
  auto point(Index i) const { return points_.col(i); }
  const Scalar* data(Index i) const { return points_.data() + i * dim(); }

  const Vector& norms() const { return norms_; }
  Scalar norm(Index i) const { return norms_[i]; }
  const Vector& radial_deficits() const { return radial_deficits_; }
  Scalar radial_deficit(Index i) const { return radial_deficits_[i]; }

  /// Copy of this cloud with one extra point appended.
  PointCloud appended(const Eigen::Ref<const Vector>& p) const {
    Matrix m(dim(), size() + 1);
    m.leftCols(size()) = points_;
    m.col(size()) = p;
    Vector eta(size() + 1);
    eta.head(size()) = radial_deficits_;
    Scalar n = 0;
    for (Index k = 0; k < dim(); ++k) n += p[k] * p[k];
    eta[size()] = Scalar(1) - std::sqrt(n);
    return PointCloud(std::move(m), std::move(eta));
  }

 private:
  void validate_points() const {
    if (points_.rows() < 1) throw DomainError("point dimension must be >= 1");
    if (!points_.allFinite()) throw DomainError("point coordinates must be finite");
  }

  void compute_norms() {
    norms_.resize(size());
    for (Index i = 0; i < size(); ++i) {
      const Scalar* x = data(i);
      Scalar s = 0;
      for (Index k = 0; k < dim(); ++k) s += x[k] * x[k];
      norms_[i] = std::sqrt(s);
    }
  }

  Matrix points_;
  Vector norms_;
  Vector radial_deficits_;
};

using PointCloudd = PointCloud<double>;

/// Indices of a farthest pair and their squared distance.
template <typename Scalar>
struct FarthestPair {
  Index first = 0;
  Index second = 0;
  Scalar squared_distance = 0;
};

namespace detail {

// The single distance routine shared by every kernel. Plain left-to-right
// accumulation; keep it that way so results are reproducible bit for bit.
template <typename Scalar>
inline Scalar squared_distance(const Scalar* a, const Scalar* b, Index d) {
  Scalar s = 0;
  for (Index k = 0; k < d; ++k) {
    const Scalar t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

template <typename Scalar>
void require_nonempty(const PointCloud<Scalar>& cloud) {
  if (cloud.empty()) throw DomainError("empty point set");
}

// Dual-tree search for far pairs over a subset of the cloud.
//
// Two upper bounds prune a pair of tree nodes:
//  * the box bound sum_k max(|hi_a - lo_b|, |hi_b - lo_a|)^2, evaluated with
//    the same rounding as squared_distance(); rounding is monotone, so it is
//    never below the computed distance of a pair drawn from the two boxes;
//  * |x|^2 + |y|^2 - 2 min <x, y>, with min <x, y> taken coordinate-wise over
//    the boxes. It is much tighter for points near a sphere but is not
//    rounding-exact, so it only prunes with a relative margin of 1e-10.
template <typename Scalar>
class FarPairSearch {
 public:
  static constexpr Index kLeafSize = 8;

  FarPairSearch(const PointCloud<Scalar>& cloud, std::vector<Index> subset)
      : dim_(cloud.dim()), index_(std::move(subset)) {
    coords_.resize(static_cast<std::size_t>(dim_) * index_.size());
    build(cloud);
  }

  // Raises `best` to the largest pair distance in the subset. Every pair whose
  // distance is >= (running best) - window when visited is passed to
  // on_pair(i, j, s) in original cloud indices; this includes all pairs with
  // s >= (final best) - window.
  template <typename OnPair>
  void maximize(Scalar& best, Scalar window, OnPair&& on_pair) {
    threshold_ = best - window;
    auto visit = [&](Index i, Index j, Scalar s) {
      if (s < threshold_) return;
      if (s > best) {
        best = s;
        threshold_ = best - window;
      }
      on_pair(index_[i], index_[j], s);
    };
    if (!nodes_.empty()) traverse(0, 0, visit);
  }

  // Calls visit(i, j, s) for every pair with s >= threshold.
  template <typename Visit>
  void collect(Scalar threshold, Visit&& visit) {
    threshold_ = threshold;
    auto wrapped = [&](Index i, Index j, Scalar s) {
      if (s >= threshold_) visit(index_[i], index_[j], s);
    };
    if (!nodes_.empty()) traverse(0, 0, wrapped);
  }

 private:
  struct Node {
    Index begin;
    Index end;
    int left = -1;
    int right = -1;
    Scalar max_sq_norm = 0;
    bool leaf() const { return left < 0; }
  };

  const Scalar* at(Index local) const { return coords_.data() + local * dim_; }
  Scalar* lo(int node) { return boxes_.data() + 2 * node * dim_; }
  Scalar* hi(int node) { return boxes_.data() + (2 * node + 1) * dim_; }

  void build(const PointCloud<Scalar>& cloud) {
    const Index n = static_cast<Index>(index_.size());
    if (n == 0) return;
    nodes_.reserve(static_cast<std::size_t>(2 * (n / kLeafSize + 1)));
    build_node(cloud, 0, n);
    boxes_.assign(2 * nodes_.size() * static_cast<std::size_t>(dim_), Scalar(0));
    for (Index i = 0; i < n; ++i) {
      std::copy_n(cloud.data(index_[i]), dim_, coords_.data() + i * dim_);
    }
    for (int v = 0; v < static_cast<int>(nodes_.size()); ++v) {
      Node& node = nodes_[v];
      Scalar* l = lo(v);
      Scalar* h = hi(v);
      std::copy_n(at(node.begin), dim_, l);
      std::copy_n(at(node.begin), dim_, h);
      for (Index i = node.begin; i < node.end; ++i) {
        const Scalar* x = at(i);
        Scalar sq = 0;
        for (Index k = 0; k < dim_; ++k) {
          l[k] = std::min(l[k], x[k]);
          h[k] = std::max(h[k], x[k]);
          sq += x[k] * x[k];
        }
        node.max_sq_norm = std::max(node.max_sq_norm, sq);
      }
    }
  }

  int build_node(const PointCloud<Scalar>& cloud, Index begin, Index end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= kLeafSize) return id;

    Index axis = 0;
    Scalar widest = -1;
    for (Index k = 0; k < dim_; ++k) {
      Scalar mn = cloud.data(index_[begin])[k];
      Scalar mx = mn;
      for (Index i = begin + 1; i < end; ++i) {
        const Scalar v = cloud.data(index_[i])[k];
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      if (mx - mn > widest) {
        widest = mx - mn;
        axis = k;
      }
    }
    const Index mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                     [&](Index a, Index b) { return cloud.data(a)[axis] < cloud.data(b)[axis]; });
    const int left = build_node(cloud, begin, mid);
    const int right = build_node(cloud, mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  Scalar box_bound(int a, int b) {
    const Scalar* la = lo(a);
    const Scalar* ha = hi(a);
    const Scalar* lb = lo(b);
    const Scalar* hb = hi(b);
    Scalar s = 0;
    for (Index k = 0; k < dim_; ++k) {
      const Scalar t = std::max(std::abs(ha[k] - lb[k]), std::abs(hb[k] - la[k]));
      s += t * t;
    }
    return s;
  }

  Scalar inner_product_bound(int a, int b) {
    const Scalar* la = lo(a);
    const Scalar* ha = hi(a);
    const Scalar* lb = lo(b);
    const Scalar* hb = hi(b);
    Scalar min_dot = 0;
    for (Index k = 0; k < dim_; ++k) {
      min_dot += std::min({la[k] * lb[k], la[k] * hb[k], ha[k] * lb[k], ha[k] * hb[k]});
    }
    const Scalar norms = nodes_[a].max_sq_norm + nodes_[b].max_sq_norm;
    return norms - 2 * min_dot + Scalar(1e-10) * norms;
  }

  bool prunable(int a, int b) {
    return box_bound(a, b) < threshold_ || inner_product_bound(a, b) < threshold_;
  }

  template <typename Visit>
  void scan(int a, int b, Visit& visit) {
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (a == b) {
      for (Index i = na.begin; i < na.end; ++i) {
        for (Index j = i + 1; j < na.end; ++j) visit(i, j, squared_distance(at(i), at(j), dim_));
      }
      return;
    }
    for (Index i = na.begin; i < na.end; ++i) {
      for (Index j = nb.begin; j < nb.end; ++j) visit(i, j, squared_distance(at(i), at(j), dim_));
    }
  }

  template <typename Visit>
  void traverse(int a, int b, Visit& visit) {
    if (prunable(a, b)) return;
    const Node& na = nodes_[a];
    const Node& nb = nodes_[b];
    if (na.leaf() && nb.leaf()) {
      scan(a, b, visit);
      return;
    }
    if (a == b) {
      traverse(na.left, na.right, visit);
      traverse(na.left, na.left, visit);
      traverse(na.right, na.right, visit);
      return;
    }
    // Split the larger node; try the more promising child pair first.
    const bool split_a = nb.leaf() || (!na.leaf() && na.end - na.begin >= nb.end - nb.begin);
    int c1, c2, other;
    if (split_a) {
      c1 = na.left, c2 = na.right, other = b;
    } else {
      c1 = nb.left, c2 = nb.right, other = a;
    }
    if (box_bound(c1, other) < box_bound(c2, other)) std::swap(c1, c2);
    traverse(c1, other, visit);
    traverse(c2, other, visit);
  }

  Index dim_;
  std::vector<Index> index_;
  std::vector<Scalar> coords_;
  std::vector<Node> nodes_;
  std::vector<Scalar> boxes_;
  Scalar threshold_ = 0;
};

template <typename Scalar>
Index farthest_from(const PointCloud<Scalar>& cloud, Index p, Scalar& best) {
  Index arg = p;
  best = 0;
  for (Index j = 0; j < cloud.size(); ++j) {
    const Scalar s = squared_distance(cloud.data(p), cloud.data(j), cloud.dim());
    if (s > best) {
      best = s;
      arg = j;
    }
  }
  return arg;
}

// Points that can still be an endpoint of a chord of squared length >= sq:
// |x - y| <= |x| + max|y|, so |x| + max_norm < sqrt(sq) rules x out.
template <typename Scalar>
std::vector<Index> norm_survivors(const PointCloud<Scalar>& cloud, Scalar sq) {
  const Scalar max_norm = cloud.norms().maxCoeff();
  const Scalar reach = std::sqrt(std::max(sq, Scalar(0)));
  const Scalar margin = Scalar(1e-12) * (reach + 2 * max_norm);
  const Scalar cut = reach - max_norm - margin;
  std::vector<Index> keep;
  for (Index i = 0; i < cloud.size(); ++i) {
    if (cloud.norm(i) >= cut) keep.push_back(i);
  }
  return keep;
}

// Farthest pair search shared by farthest_pair() and diameter_deficit().
//
// A heuristic chain (largest-norm point, then two farthest-point hops) gives
// a lower bound d0. Points with |x| + max|y| < d0 cannot be an endpoint of a
// longer chord and are dropped; the survivors are scanned exactly while d0
// keeps rising. on_pair sees every pair within `window` of the running best.
template <typename Scalar, typename OnPair>
FarthestPair<Scalar> search_farthest(const PointCloud<Scalar>& cloud, Scalar window, OnPair&& on_pair) {
  require_nonempty(cloud);
  FarthestPair<Scalar> out;
  if (cloud.size() == 1) return out;

  Index p;
  cloud.norms().maxCoeff(&p);
  Scalar best = 0;
  Index q = farthest_from(cloud, p, best);
  out = {p, q, best};
  if (best == 0) return out;  // every point coincides with p
  for (int hop = 0; hop < 2; ++hop) {
    Scalar s;
    const Index r = farthest_from(cloud, q, s);
    if (s <= best) break;
    out = {q, r, s};
    best = s;
    q = r;
  }

  std::vector<Index> survivors = norm_survivors(cloud, best - window);
  constexpr std::size_t kDirectScan = 48;
  if (survivors.size() <= kDirectScan) {
    for (std::size_t a = 0; a < survivors.size(); ++a) {
      for (std::size_t b = a + 1; b < survivors.size(); ++b) {
        const Index i = survivors[a];
        const Index j = survivors[b];
        const Scalar s = squared_distance(cloud.data(i), cloud.data(j), cloud.dim());
        if (s < best - window) continue;
        if (s > best) {
          best = s;
          out = {i, j, s};
        }
        on_pair(i, j, s);
      }
    }
    return out;
  }

  FarPairSearch<Scalar> search(cloud, std::move(survivors));
  search.maximize(best, window, [&](Index i, Index j, Scalar s) {
    if (s >= best) out = {i, j, s};
    on_pair(i, j, s);
  });
  return out;
}

}  // namespace detail

/// Largest interpoint distance by exhaustive pairwise scan.
template <typename Scalar>
Scalar diameter_bruteforce(const PointCloud<Scalar>& cloud) {
  detail::require_nonempty(cloud);
  Scalar best = 0;
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index j = i + 1; j < cloud.size(); ++j) {
      best = std::max(best, detail::squared_distance(cloud.data(i), cloud.data(j), cloud.dim()));
    }
  }
  return std::sqrt(best);
}

/// Farthest pair: norm pruning against a heuristic lower bound, then an exact
/// dual-tree scan of the surviving points.
template <typename Scalar>
FarthestPair<Scalar> farthest_pair(const PointCloud<Scalar>& cloud) {
  return detail::search_farthest(cloud, Scalar(0), [](Index, Index, Scalar) {});
}

/// Largest interpoint distance; identical to diameter_bruteforce().
template <typename Scalar>
Scalar diameter_pruned(const PointCloud<Scalar>& cloud) {
  return std::sqrt(farthest_pair(cloud).squared_distance);
}

/// Visits every pair (i, j, squared distance) whose computed squared distance
/// is at least `threshold`.
template <typename Scalar, typename Visit>
void for_each_far_pair(const PointCloud<Scalar>& cloud, Scalar threshold, Visit&& visit) {
  detail::require_nonempty(cloud);
  if (cloud.size() < 2) return;
  std::vector<Index> survivors = detail::norm_survivors(cloud, threshold);
  detail::FarPairSearch<Scalar> search(cloud, std::move(survivors));
  search.collect(threshold, visit);
}

/// 2 - |x_i - x_j| evaluated without cancellation, using
/// 4 - |x - y|^2 = 2(1 - |x|^2) + 2(1 - |y|^2) + |x + y|^2
/// with 1 - |x|^2 taken from the cached radial deficit.
template <typename Scalar>
Scalar chord_deficit(const PointCloud<Scalar>& cloud, Index i, Index j) {
  const Scalar ei = cloud.radial_deficit(i);
  const Scalar ej = cloud.radial_deficit(j);
  const Scalar* x = cloud.data(i);
  const Scalar* y = cloud.data(j);
  Scalar sum2 = 0;
  for (Index k = 0; k < cloud.dim(); ++k) {
    const Scalar t = x[k] + y[k];
    sum2 += t * t;
  }
  const Scalar gap = 2 * ei * (2 - ei) + 2 * ej * (2 - ej) + sum2;  // 4 - |x - y|^2
  return gap / (2 + std::sqrt(std::max(Scalar(0), 4 - gap)));
}

/// Farthest pair together with 2 - diam evaluated by chord_deficit().
template <typename Scalar>
struct DiameterDeficit {
  FarthestPair<Scalar> pair;
  Scalar deficit = 2;
};

/// 2 - diam(cloud), accurate even when the deficit is far below the spacing of
/// representable diameters near 2: pairs within a relative 1e-12 of the
/// largest squared distance are re-ranked by chord_deficit(). A set with
/// fewer than two distinct points has deficit 2.
template <typename Scalar>
DiameterDeficit<Scalar> diameter_with_deficit(const PointCloud<Scalar>& cloud) {
  detail::require_nonempty(cloud);
  DiameterDeficit<Scalar> out;
  Scalar window = 0;
  if (cloud.size() > 1) {
    const Scalar r = cloud.norms().maxCoeff();
    window = Scalar(1e-12) * std::max(4 * r * r, Scalar(1));
  }
  std::vector<std::pair<Index, Index>> near;
  Scalar running = 0;
  out.pair = detail::search_farthest(cloud, window, [&](Index i, Index j, Scalar s) {
    running = std::max(running, s);
    if (near.size() > 64) {
      std::erase_if(near, [&](const auto& ij) {
        return detail::squared_distance(cloud.data(ij.first), cloud.data(ij.second), cloud.dim()) <
               running - window;
      });
    }
    near.emplace_back(i, j);
  });
  if (out.pair.squared_distance == 0) return out;
  out.deficit = chord_deficit(cloud, out.pair.first, out.pair.second);
  for (const auto& [i, j] : near) {
    if (detail::squared_distance(cloud.data(i), cloud.data(j), cloud.dim()) >=
        out.pair.squared_distance - window) {
      out.deficit = std::min(out.deficit, chord_deficit(cloud, i, j));
    }
  }
  return out;
}

template <typename Scalar>
Scalar diameter_deficit(const PointCloud<Scalar>& cloud) {
  return diameter_with_deficit(cloud).deficit;
}

/// Normalising factor n^{2/gamma} of the scaled deficit.
inline double deficit_scale(double n, double gamma) {
  if (!(n > 0) || !(gamma > 0)) throw DomainError("deficit scale needs n > 0 and gamma > 0");
  return std::pow(n, 2.0 / gamma);
}

/// n^{2/gamma} (2 - diam) for a diameter of a set inside the unit ball.
inline double scaled_deficit(double diam, double n, double gamma) {
  if (!(diam >= 0)) throw DomainError("diameter must be >= 0");
  if (diam > 2.0 + 1e-9) throw DomainError("diameter exceeds 2: points outside the unit ball");
  return deficit_scale(n, gamma) * std::max(0.0, 2.0 - diam);
}

}  // namespace diamlab
