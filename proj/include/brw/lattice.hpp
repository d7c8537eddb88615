#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

/// Lattice point. Coordinates beyond the working dimension are kept at zero.
using Site = Eigen::Vector3i;

constexpr int kMaxDim = 3;

inline void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
  }
}

/// Number of stencil points of the lazy nearest-neighbour kernel, 2d+1.
inline int stencil_size(int dim) { return 2 * dim + 1; }

/// Stencil offsets in fixed order: origin, -e_1, +e_1, -e_2, +e_2, ...
std::vector<Site> neighborhood(int dim);

inline int l1_norm(const Site& x) { return x.cwiseAbs().sum(); }
inline std::int64_t squared_norm(const Site& x) {
  return static_cast<std::int64_t>(x.cast<std::int64_t>().squaredNorm());
}

/// Dense real-valued function on the centered box {-R..R}^d.
///
/// Values are stored in lexicographic order with the first coordinate
/// varying slowest. `tail_bound` carries a certified bound on the mass that
/// was discarded outside the box (zero for unclamped fields).
template <typename Scalar>
class BasicField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BasicField() = default;
  BasicField(int dim, int radius) : dim_(dim), radius_(radius) {
    check_dim(dim);
    if (radius < 0) throw std::invalid_argument("field radius must be >= 0");
    std::int64_t size = 1;
    for (int k = 0; k < dim; ++k) size *= width();
    values_ = Values::Zero(size);
  }

  static BasicField delta(int dim) {
    BasicField f(dim, 0);
    f.values_(0) = Scalar(1);
    return f;
  }

  static BasicField constant(int dim, int radius, Scalar c) {
    BasicField f(dim, radius);
    f.values_.setConstant(c);
    return f;
  }

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  int width() const { return 2 * radius_ + 1; }
  Eigen::Index size() const { return values_.size(); }

  /// Step count the field represents (metadata for export).
  int steps() const { return steps_; }
  void set_steps(int n) { steps_ = n; }

  Scalar tail_bound() const { return tail_bound_; }
  void set_tail_bound(Scalar t) { tail_bound_ = t; }

  Values& values() { return values_; }
  const Values& values() const { return values_; }

  bool contains(const Site& x) const {
    for (int k = 0; k < dim_; ++k) {
      if (x(k) < -radius_ || x(k) > radius_) return false;
    }
    for (int k = dim_; k < kMaxDim; ++k) {
      if (x(k) != 0) return false;
    }
    return true;
  }

  Eigen::Index index(const Site& x) const {
    Eigen::Index idx = 0;
    for (int k = 0; k < dim_; ++k) idx = idx * width() + (x(k) + radius_);
    return idx;
  }

  Site site(Eigen::Index idx) const {
    Site x = Site::Zero();
    for (int k = dim_ - 1; k >= 0; --k) {
      x(k) = static_cast<int>(idx % width()) - radius_;
      idx /= width();
    }
    return x;
  }

  /// Value at x; zero outside the stored box.
  Scalar operator()(const Site& x) const {
    return contains(x) ? values_(index(x)) : Scalar(0);
  }

  Scalar& at(const Site& x) {
    if (!contains(x)) throw std::out_of_range("site outside field box");
    return values_(index(x));
  }

  Scalar sum() const { return values_.sum(); }

  /// Copy into a box of a different radius (zero padding or truncation).
  BasicField resized(int new_radius) const {
    BasicField out(dim_, new_radius);
    out.steps_ = steps_;
    out.tail_bound_ = tail_bound_;
    const int r = std::min(radius_, new_radius);
    for_each_in_box(dim_, r, [&](const Site& x) { out.at(x) = (*this)(x); });
    return out;
  }

  template <typename Fn>
  static void for_each_in_box(int dim, int r, Fn&& fn) {
    Site x = Site::Zero();
    for (int k = 0; k < dim; ++k) x(k) = -r;
    while (true) {
      fn(static_cast<const Site&>(x));
      int k = dim - 1;
      while (k >= 0 && x(k) == r) {
        x(k) = -r;
        --k;
      }
      if (k < 0) break;
      ++x(k);
    }
  }

 private:
  int dim_ = 1;
  int radius_ = 0;
  int steps_ = 0;
  Scalar tail_bound_ = Scalar(0);
  Values values_;
};

using Field = BasicField<double>;

/// Radius used for clamped n-step fields: ceil(c * sqrt(n ln(n+2))).
inline int clamp_radius(int n, double c = 6.0) {
  return static_cast<int>(std::ceil(c * std::sqrt(n * std::log(n + 2.0))));
}

/// Hoeffding bound on the probability that an n-step lazy walk leaves the
/// box of radius r: 2d exp(-(r+1)^2 / (2n)).
inline double hoeffding_tail(int n, int dim, int r) {
  if (n == 0 || r >= n) return 0.0;
  const double t = r + 1.0;
  return std::min(1.0, 2.0 * dim * std::exp(-t * t / (2.0 * n)));
}

/// One application of the lazy nearest-neighbour Markov operator:
/// out(x) = (1/(2d+1)) sum_{e in N} f(x - e).
///
/// The output box grows by one unless `clamp` caps it; mass pushed outside
/// the cap is added to the tail bound. Each output cell is summed in a
/// fixed stencil order, so the result does not depend on threading.
template <typename Scalar>
BasicField<Scalar> apply_markov(const BasicField<Scalar>& f,
                                std::optional<int> clamp = std::nullopt) {
  const int dim = f.dim();
  int out_r = f.radius() + 1;
  if (clamp && *clamp < out_r) out_r = std::max(*clamp, 0);

  // Pad the input to radius out_r + 1 so every stencil read is in range.
  const int pad_r = out_r + 1;
  const int pw = 2 * pad_r + 1;
  std::int64_t pad_size = 1;
  for (int k = 0; k < dim; ++k) pad_size *= pw;
  typename BasicField<Scalar>::Values padded =
      BasicField<Scalar>::Values::Zero(pad_size);
  const int copy_r = std::min(f.radius(), pad_r);
  auto pad_index = [&](const Site& x) {
    Eigen::Index idx = 0;
    for (int k = 0; k < dim; ++k) idx = idx * pw + (x(k) + pad_r);
    return idx;
  };
  BasicField<Scalar>::for_each_in_box(
      dim, copy_r, [&](const Site& x) { padded(pad_index(x)) = f(x); });

  Eigen::Index strides[kMaxDim] = {0, 0, 0};
  {
    Eigen::Index s = 1;
    for (int k = dim - 1; k >= 0; --k) {
      strides[k] = s;
      s *= pw;
    }
  }

  BasicField<Scalar> out(dim, out_r);
  const Scalar norm = Scalar(1) / Scalar(stencil_size(dim));
  Eigen::Index o = 0;
  BasicField<Scalar>::for_each_in_box(dim, out_r, [&](const Site& x) {
    const Eigen::Index p = pad_index(x);
    Scalar acc = padded(p);
    for (int k = 0; k < dim; ++k) {
      acc += padded(p - strides[k]);
      acc += padded(p + strides[k]);
    }
    out.values()(o++) = acc * norm;
  });

  out.set_steps(f.steps() + 1);
  // Mass whose next step leaves the output box, summed directly.
  Scalar dropped(0);
  if (out_r < f.radius() + 1) {
    BasicField<Scalar>::for_each_in_box(dim, f.radius(), [&](const Site& x) {
      int exits = 0;
      bool inside = true;
      for (int k = 0; k < dim; ++k) {
        inside = inside && std::abs(x(k)) <= out_r;
        exits += (x(k) - 1 < -out_r || x(k) - 1 > out_r) + (x(k) + 1 < -out_r || x(k) + 1 > out_r);
      }
      if (!inside) exits += 1;
      if (exits > 0) dropped += f(x) * Scalar(exits) * norm;
    });
  }
  out.set_tail_bound(f.tail_bound() + dropped);
  return out;
}

/// Exact n-step transition probabilities P_n on a box of radius
/// min(n, clamp). With a clamp the tail bound holds the discarded mass.
Field transition_field(int n, int dim, std::optional<int> clamp = std::nullopt);

/// out(y) = sum_x f(x) g(y - x) over the stored supports.
template <typename Scalar>
BasicField<Scalar> convolve(const BasicField<Scalar>& f,
                            const BasicField<Scalar>& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("dimension mismatch");
  const int dim = f.dim();
  BasicField<Scalar> out(dim, f.radius() + g.radius());
  BasicField<Scalar>::for_each_in_box(dim, f.radius(), [&](const Site& x) {
    const Scalar fx = f(x);
    if (fx == Scalar(0)) return;
    BasicField<Scalar>::for_each_in_box(dim, g.radius(), [&](const Site& z) {
      out.values()(out.index(x + z)) += fx * g(z);
    });
  });
  out.set_steps(f.steps() + g.steps());
  out.set_tail_bound(f.tail_bound() + g.tail_bound());
  return out;
}

/// Plain lazy random walk path of n steps from the origin.
std::vector<Site> sample_srw(int n, int dim, Rng& rng);

/// Uniform draw from the 2d+1 stencil offsets.
Site sample_step(int dim, Rng& rng);

/// Field CSV: `# dim=<d> n=<n> radius=<R> tail_bound=<t>` then
/// `x1,...,xd,value` rows in lexicographic site order.
void write_field_csv(std::ostream& os, const Field& f);
Field read_field_csv(std::istream& is);

}  // namespace brw
