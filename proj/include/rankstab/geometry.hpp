#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rankstab/errors.hpp"

namespace rankstab {

// Attribute-space vector. Used for tuple values, signed refinements,
// per-attribute magnitudes and bound widths alike.
using Vector = Eigen::ArrayXd;

inline void check_same_size(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    fail(errc::dimension, std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                              " vs " + std::to_string(b) + ")");
  }
}

// Containment partial order: a is contained in b when |a_i| <= |b_i| for
// every attribute. Works on refinements and magnitudes interchangeably.
template <typename DA, typename DB>
bool contains_leq(const Eigen::ArrayBase<DA>& a, const Eigen::ArrayBase<DB>& b) {
  check_same_size(a.size(), b.size(), "contains_leq");
  return (a.derived().abs() <= b.derived().abs()).all();
}

// Strict containment: contained and differing in at least one component.
template <typename DA, typename DB>
bool contains_lt(const Eigen::ArrayBase<DA>& a, const Eigen::ArrayBase<DB>& b) {
  check_same_size(a.size(), b.size(), "contains_lt");
  return (a.derived().abs() <= b.derived().abs()).all() &&
         (a.derived().abs() < b.derived().abs()).any();
}

namespace detail {
// Lexicographic order on equally sized vectors; ties broken nowhere (equal
// vectors compare equivalent). Used only to keep boundary storage canonical.
inline bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

inline bool leq_all(const Vector& a, const Vector& b) {
  return (a <= b).all();
}
}  // namespace detail

// Antichain of minimal unstable magnitudes. All stored points are
// componentwise non-negative and pairwise incomparable under containment.
// Storage is kept sorted lexicographically so reports are reproducible and
// two-dimensional membership tests can binary search.
class Boundary {
 public:
  Boundary() = default;
  explicit Boundary(const std::vector<Vector>& pts) {
    for (const auto& p : pts) insert(p);
  }

  bool empty() const { return pts_.empty(); }
  std::size_t size() const { return pts_.size(); }
  Eigen::Index dim() const { return pts_.empty() ? -1 : pts_.front().size(); }
  const std::vector<Vector>& points() const { return pts_; }

  // Inserts the magnitude |m| unless an existing point is contained in it;
  // existing points that contain it are dropped. Returns true when kept.
  bool insert(const Vector& m) {
    Vector p = m.abs();
    if (!pts_.empty()) check_same_size(p.size(), pts_.front().size(), "Boundary::insert");
    // rejected if some q <= p; such q has q[0] <= p[0], so the sorted prefix suffices
    for (const auto& q : pts_) {
      if (q[0] > p[0]) break;
      if (detail::leq_all(q, p)) return false;
    }
    std::erase_if(pts_, [&](const Vector& q) { return detail::leq_all(p, q); });
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p, detail::lex_less);
    pts_.insert(it, std::move(p));
    return true;
  }

  // True when some boundary point is contained in magnitude m, i.e. m lies
  // outside the stable zone. Boundary points themselves are excluded too.
  bool excludes(const Vector& m) const {
    if (pts_.empty()) return false;
    check_same_size(m.size(), pts_.front().size(), "Boundary::excludes");
    if (m.size() == 2) {
      // points have strictly increasing x and strictly decreasing y
      auto it = std::upper_bound(pts_.begin(), pts_.end(), m[0],
                                 [](double x, const Vector& q) { return x < q[0]; });
      if (it == pts_.begin()) return false;
      return (*(it - 1))[1] <= m[1];
    }
    for (const auto& q : pts_) {
      if (q[0] > m[0]) break;
      if (detail::leq_all(q, m)) return true;
    }
    return false;
  }

 private:
  std::vector<Vector> pts_;
};

// Stable zone membership: no boundary point is contained in m. Points of the
// boundary itself are outside the zone.
inline bool in_stable_zone(const Vector& magnitude, const Boundary& sb) {
  if (sb.empty()) return true;
  return !sb.excludes(magnitude.abs());
}

// Minimal antichain (skyline) of a point set under containment.
inline Boundary min_skyline(const std::vector<Vector>& points) {
  Boundary b;
  for (const auto& p : points) b.insert(p);
  return b;
}

// Per-attribute symmetric bound on refinements: |eps_i| <= eps_max_i.
// A zero width freezes the attribute.
struct ReasonableChanges {
  Vector eps_max;

  explicit ReasonableChanges(Vector widths = Vector()) : eps_max(std::move(widths)) {
    for (Eigen::Index i = 0; i < eps_max.size(); ++i) {
      if (!std::isfinite(eps_max[i]) || eps_max[i] < 0.0) {
        fail(errc::domain, "ReasonableChanges: eps_max must be finite and non-negative");
      }
    }
  }

  Eigen::Index dim() const { return eps_max.size(); }

  bool admits(const Vector& eps) const {
    check_same_size(eps.size(), eps_max.size(), "ReasonableChanges::admits");
    return (eps.abs() <= eps_max).all();
  }
};

// Volume of the signed refinement box, counting only attributes with
// positive width (frozen attributes would zero out every comparison).
inline double box_volume(const ReasonableChanges& rc) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < rc.eps_max.size(); ++i) {
    if (rc.eps_max[i] > 0.0) v *= 2.0 * rc.eps_max[i];
  }
  return v;
}

}  // namespace rankstab
