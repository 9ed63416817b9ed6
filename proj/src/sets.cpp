// SPDX-License-Identifier: Apache-2.0
#include "vireg/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace vireg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orthonormal basis of span(vs); directions already spanned are dropped.
std::vector<Point> orthonormalize(const std::vector<Point>& vs) {
  std::vector<Point> out;
  for (Point v : vs) {
    for (const Point& u : out) v -= u.dot(v) * u;
    const double nv = v.norm();
    if (nv > 1e-12) out.push_back(v / nv);
  }
  return out;
}

std::string vec_str(const Point& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ")";
  return os.str();
}

// Projection onto { <n,x> = b, lo <= x <= hi }: x = clamp(z - lambda n), with
// lambda the root of the non-increasing piecewise-linear function h below.
Point project_hyperplane_box(const Point& z, const Point& n, double b, const Point& lo,
                             const Point& hi) {
  const Eigen::Index dim = z.size();
  auto at = [&](double lambda) -> Point {
    Point x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = std::clamp(z(i) - lambda * n(i), lo(i), hi(i));
    return x;
  };
  auto h = [&](double lambda) { return n.dot(at(lambda)) - b; };
  // Slope of h on an open interval around lambda: minus the squared norm of the
  // normal restricted to coordinates that are off their bounds there.
  auto slope = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (n(i) == 0.0) continue;
      const double v = z(i) - lambda * n(i);
      if (v > lo(i) && v < hi(i)) s -= n(i) * n(i);
    }
    return s;
  };

  std::vector<double> breaks;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (n(i) == 0.0) continue;
    if (std::isfinite(lo(i))) breaks.push_back((z(i) - lo(i)) / n(i));
    if (std::isfinite(hi(i))) breaks.push_back((z(i) - hi(i)) / n(i));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  if (breaks.empty()) {
    double num = -b, den = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (n(i) == 0.0) continue;
      num += n(i) * z(i);
      den += n(i) * n(i);
    }
    return at(num / den);
  }

  // Locate the bracket containing the root.
  std::size_t k = 0;
  while (k < breaks.size() && h(breaks[k]) > 0.0) ++k;
  double anchor, s;
  if (k == breaks.size()) {
    anchor = breaks.back();
    s = slope(anchor + 1.0);
  } else if (k == 0) {
    anchor = breaks.front();
    s = slope(anchor - 1.0);
  } else {
    anchor = breaks[k - 1];
    s = slope(0.5 * (breaks[k - 1] + breaks[k]));
  }
  const double ha = h(anchor);
  if (ha == 0.0 || s == 0.0) return at(anchor);
  return at(anchor - ha / s);
}

// argmin over { <n,x> = b, lo <= x <= hi } of 0.5||x - z||^2 + sum psi_i(x_i):
// x_i(lambda) = clamp(prox_i(z_i - lambda n_i)), with lambda a root of the
// non-increasing function <n, x(lambda)> - b, located by bisection.
Point prox_hyperplane_box(const Point& z, const Point& n, double b, const Point& lo,
                          const Point& hi, const FeasibleSet::ScalarProx& prox) {
  const Eigen::Index dim = z.size();
  auto at = [&](double lambda) -> Point {
    Point x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      x(i) = std::clamp(prox(z(i) - lambda * n(i), i), lo(i), hi(i));
    }
    return x;
  };
  auto h = [&](double lambda) { return n.dot(at(lambda)) - b; };
  double a = -1.0, c = 1.0;
  for (int k = 0; k < 2000 && h(a) < 0.0; ++k) a *= 2.0;
  for (int k = 0; k < 2000 && h(c) > 0.0; ++k) c *= 2.0;
  for (int k = 0; k < 400; ++k) {
    const double m = 0.5 * (a + c);
    if (m <= a || m >= c) break;
    const double hm = h(m);
    if (hm == 0.0) return at(m);
    if (hm > 0.0) a = m;
    else c = m;
  }
  const Point xa = at(a), xc = at(c);
  return std::abs(n.dot(xa) - b) <= std::abs(n.dot(xc) - b) ? xa : xc;
}

}  // namespace

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::box: return "box";
    case SetKind::shifted_orthant: return "shifted_orthant";
    case SetKind::hyperplane_box: return "hyperplane_box";
    case SetKind::ball: return "ball";
    case SetKind::product: return "product";
    case SetKind::intersection: return "intersection";
    case SetKind::custom: return "custom";
  }
  return "unknown";
}

FeasibleSet FeasibleSet::box(Point lower, Point upper) {
  if (lower.size() != upper.size()) throw DimensionError("box: bound dimensions differ");
  if (lower.size() < 1) throw DimensionError("box: empty dimension");
  if ((lower.array() > upper.array()).any()) throw DomainError("box: lower > upper");
  if (lower.array().isNaN().any() || upper.array().isNaN().any()) {
    throw DomainError("box: NaN bound");
  }
  FeasibleSet s;
  s.dim_ = lower.size();
  s.kind_ = SetKind::box;
  s.description_ = "box " + vec_str(lower) + " .. " + vec_str(upper);
  s.project_ = [lower, upper](const Point& z) -> Point {
    return z.cwiseMax(lower).cwiseMin(upper);
  };
  s.contains_ = [lower, upper](const Point& x, double tol) {
    return ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
  };
  s.prox_ = [lower, upper](const Point& z, const ScalarProx& prox) -> Point {
    Point x(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) x(i) = std::clamp(prox(z(i), i), lower(i), upper(i));
    return x;
  };
  if (lower.allFinite() && upper.allFinite()) s.bounds_ = std::make_pair(lower, upper);
  return s;
}

FeasibleSet FeasibleSet::unit_box(Eigen::Index dimension) {
  return box(Point::Zero(dimension), Point::Ones(dimension));
}

FeasibleSet FeasibleSet::whole_space(Eigen::Index dimension) {
  FeasibleSet s = box(Point::Constant(dimension, -kInf), Point::Constant(dimension, kInf));
  s.description_ = "R^" + std::to_string(dimension);
  return s;
}

FeasibleSet FeasibleSet::shifted_orthant(Point shift) {
  if (!shift.allFinite()) throw DomainError("shifted_orthant: non-finite shift");
  FeasibleSet s = box(shift, Point::Constant(shift.size(), kInf));
  s.kind_ = SetKind::shifted_orthant;
  s.description_ = "orthant + " + vec_str(shift);
  return s;
}

FeasibleSet FeasibleSet::hyperplane_box(Point normal, double rhs, Point lower, Point upper) {
  const Eigen::Index dim = normal.size();
  if (lower.size() != dim || upper.size() != dim) {
    throw DimensionError("hyperplane_box: dimension mismatch");
  }
  if (!normal.allFinite() || normal.squaredNorm() == 0.0) {
    throw DomainError("hyperplane_box: normal must be finite and nonzero");
  }
  if ((lower.array() > upper.array()).any()) throw DomainError("hyperplane_box: lower > upper");
  // Nonemptiness: rhs must lie in the range of <n, x> over the box.
  double lo_val = 0.0, hi_val = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (normal(i) == 0.0) continue;
    const double a = normal(i) * (normal(i) > 0 ? lower(i) : upper(i));
    const double c = normal(i) * (normal(i) > 0 ? upper(i) : lower(i));
    lo_val += a;
    hi_val += c;
  }
  if (rhs < lo_val || rhs > hi_val) throw DomainError("hyperplane_box: empty set");

  FeasibleSet s;
  s.dim_ = dim;
  s.kind_ = SetKind::hyperplane_box;
  std::ostringstream os;
  os << "{<" << vec_str(normal) << ",x> = " << rhs << "} & box " << vec_str(lower) << " .. "
     << vec_str(upper);
  s.description_ = os.str();
  s.project_ = [normal, rhs, lower, upper](const Point& z) {
    return project_hyperplane_box(z, normal, rhs, lower, upper);
  };
  const double nn = normal.norm();
  s.contains_ = [normal, rhs, lower, upper, nn](const Point& x, double tol) {
    return std::abs(normal.dot(x) - rhs) <= tol * std::max(1.0, nn) &&
           ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
  };
  s.prox_ = [normal, rhs, lower, upper](const Point& z, const ScalarProx& prox) {
    return prox_hyperplane_box(z, normal, rhs, lower, upper, prox);
  };
  s.normals_ = {normal / nn};
  if (lower.allFinite() && upper.allFinite()) s.bounds_ = std::make_pair(lower, upper);
  return s;
}

FeasibleSet FeasibleSet::ball(Point center, double radius) {
  if (!center.allFinite() || !(radius >= 0.0) || !std::isfinite(radius)) {
    throw DomainError("ball: invalid center or radius");
  }
  FeasibleSet s;
  s.dim_ = center.size();
  s.kind_ = SetKind::ball;
  std::ostringstream os;
  os << "ball " << vec_str(center) << " r=" << radius;
  s.description_ = os.str();
  s.project_ = [center, radius](const Point& z) -> Point {
    const Point d = z - center;
    const double nd = d.norm();
    if (nd <= radius) return z;
    return center + (radius / nd) * d;
  };
  s.contains_ = [center, radius](const Point& x, double tol) {
    return (x - center).norm() <= radius + tol;
  };
  s.bounds_ = std::make_pair(Point(center.array() - radius), Point(center.array() + radius));
  return s;
}

FeasibleSet FeasibleSet::product(std::vector<FeasibleSet> parts) {
  if (parts.empty()) throw DimensionError("product: no parts");
  FeasibleSet s;
  s.kind_ = SetKind::product;
  std::vector<Eigen::Index> offsets;
  std::string desc;
  bool bounded = true;
  for (const auto& p : parts) {
    offsets.push_back(s.dim_);
    s.dim_ += p.dim_;
    desc += (desc.empty() ? "" : " x ") + p.description_;
    bounded = bounded && p.bounds_.has_value();
  }
  s.description_ = desc;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (const Point& nrm : parts[k].normals_) {
      Point e = Point::Zero(s.dim_);
      e.segment(offsets[k], parts[k].dim_) = nrm;
      s.normals_.push_back(e);
    }
  }
  if (bounded) {
    Point lo(s.dim_), hi(s.dim_);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      lo.segment(offsets[k], parts[k].dim_) = parts[k].bounds_->first;
      hi.segment(offsets[k], parts[k].dim_) = parts[k].bounds_->second;
    }
    s.bounds_ = std::make_pair(lo, hi);
  }
  s.project_ = [parts, offsets](const Point& z) {
    Point out(z.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const auto d = parts[k].dimension();
      out.segment(offsets[k], d) = parts[k].project(z.segment(offsets[k], d));
    }
    return out;
  };
  s.contains_ = [parts, offsets](const Point& x, double tol) {
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (!parts[k].contains(x.segment(offsets[k], parts[k].dimension()), tol)) return false;
    }
    return true;
  };
  const bool separable = std::all_of(parts.begin(), parts.end(),
                                     [](const FeasibleSet& p) { return p.supports_separable_prox(); });
  if (separable) {
    s.prox_ = [parts, offsets](const Point& z, const ScalarProx& prox) {
      Point out(z.size());
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto d = parts[k].dimension();
        const Eigen::Index off = offsets[k];
        out.segment(off, d) = *parts[k].prox_separable(
            z.segment(off, d), [&prox, off](double v, Eigen::Index i) { return prox(v, i + off); });
      }
      return out;
    };
  }
  return s;
}

FeasibleSet FeasibleSet::intersection(std::vector<FeasibleSet> parts,
                                      std::optional<Projector> projector) {
  if (parts.empty()) throw DimensionError("intersection: no parts");
  FeasibleSet s;
  s.kind_ = SetKind::intersection;
  s.dim_ = parts.front().dim_;
  std::vector<Point> normals;
  for (const auto& p : parts) {
    if (p.dim_ != s.dim_) throw DimensionError("intersection: parts differ in dimension");
    s.description_ += (s.description_.empty() ? "" : " & ") + p.description_;
    normals.insert(normals.end(), p.normals_.begin(), p.normals_.end());
    if (p.bounds_ && !s.bounds_) s.bounds_ = p.bounds_;
  }
  s.normals_ = orthonormalize(normals);
  if (projector) {
    s.project_ = *projector;
  } else {
    const std::string desc = s.description_;
    s.project_ = [desc](const Point&) -> Point {
      throw UnsupportedSetError("no projector registered for composite set: " + desc);
    };
  }
  s.contains_ = [parts](const Point& x, double tol) {
    return std::all_of(parts.begin(), parts.end(),
                       [&](const FeasibleSet& p) { return p.contains(x, tol); });
  };
  return s;
}

FeasibleSet FeasibleSet::custom(Eigen::Index dimension, Projector projector, Membership contains,
                                std::string description) {
  if (dimension < 1) throw DimensionError("custom set: dimension must be positive");
  FeasibleSet s;
  s.dim_ = dimension;
  s.kind_ = SetKind::custom;
  s.description_ = std::move(description);
  s.project_ = std::move(projector);
  s.contains_ = std::move(contains);
  return s;
}

Point FeasibleSet::project(const Point& z) const {
  require_point(z, dim_, "FeasibleSet::project");
  return project_(z);
}

bool FeasibleSet::contains(const Point& x, double tol) const {
  if (x.size() != dim_) throw DimensionError("FeasibleSet::contains: dimension mismatch");
  return contains_(x, tol);
}

Point FeasibleSet::reduce_to_affine_hull(const Point& v) const {
  Point r = v;
  for (const Point& u : normals_) r -= u.dot(r) * u;
  return r;
}

std::optional<std::pair<Point, Point>> FeasibleSet::bounds() const { return bounds_; }

std::optional<Point> FeasibleSet::prox_separable(const Point& z, const ScalarProx& prox) const {
  require_point(z, dim_, "FeasibleSet::prox_separable");
  if (!prox_) return std::nullopt;
  return prox_(z, prox);
}

}  // namespace vireg
