/* Copyright 2026 The shapeseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "shapeseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "shapeseg/errors.hpp"
#include "shapeseg/rng.hpp"

namespace shapeseg {
namespace {

std::vector<double> square_roots(std::span<const std::int64_t> squared) {
  std::vector<double> out(squared.size());
  std::transform(squared.begin(), squared.end(), out.begin(),
                 [](std::int64_t s) { return std::sqrt(static_cast<double>(s)); });
  return out;
}

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

// Row pass of the separable EDT (Meijster et al.): given the per-column
// vertical distances g of one row, writes the squared distance to the
// nearest source for every x.
class RowEnvelope {
 public:
  explicit RowEnvelope(int width) : s_(width), t_(width) {}

  void run(std::span<const std::int64_t> g, std::span<std::int64_t> out) {
    const int m = static_cast<int>(g.size());
    auto f = [&](std::int64_t x, std::int64_t i) {
      return (x - i) * (x - i) + g[i] * g[i];
    };
    auto sep = [&](std::int64_t i, std::int64_t u) {
      return floor_div(u * u - i * i + g[u] * g[u] - g[i] * g[i], 2 * (u - i));
    };
    int q = 0;
    s_[0] = 0;
    t_[0] = 0;
    for (int u = 1; u < m; ++u) {
      while (q >= 0 && f(t_[q], s_[q]) > f(t_[q], u)) --q;
      if (q < 0) {
        q = 0;
        s_[0] = u;
      } else {
        const std::int64_t w = 1 + sep(s_[q], u);
        if (w < m) {
          ++q;
          s_[q] = u;
          t_[q] = w;
        }
      }
    }
    for (int u = m - 1; u >= 0; --u) {
      out[u] = f(u, s_[q]);
      if (u == t_[q]) --q;
    }
  }

 private:
  std::vector<std::int64_t> s_;
  std::vector<std::int64_t> t_;
};

}  // namespace

DistanceField::DistanceField(int width, int height, std::vector<std::int64_t> squared,
                             bool has_boundary)
    : squared_(std::move(squared)),
      field_(width, height, square_roots(squared_)),
      has_boundary_(has_boundary) {}

DistanceField distance_to_other_class(const LabelMap& labels) {
  const int w = labels.width();
  const int h = labels.height();
  const auto ids = labels.ids();
  std::vector<std::int64_t> squared(ids.size(), 0);

  std::vector<char> present(labels.num_classes(), 0);
  for (ClassId id : ids) present[id] = 1;
  if (std::count(present.begin(), present.end(), 1) < 2) {
    return DistanceField(w, h, std::move(squared), false);
  }

  const std::int64_t inf = static_cast<std::int64_t>(w) + h;
  std::vector<std::int64_t> g(ids.size());
  std::vector<std::int64_t> row_out(w);
  std::vector<char> row_has_class(h);
  RowEnvelope envelope(w);

  for (ClassId c = 0; c < labels.num_classes(); ++c) {
    if (!present[c]) continue;
    // Column pass: vertical distance to the nearest pixel not of class c.
    for (int y = 0; y < h; ++y) {
      const std::size_t row = static_cast<std::size_t>(y) * w;
      bool any = false;
      for (int x = 0; x < w; ++x) {
        if (ids[row + x] != c) {
          g[row + x] = 0;
        } else {
          any = true;
          g[row + x] = y == 0 ? inf : std::min(inf, g[row - w + x] + 1);
        }
      }
      row_has_class[y] = any;
    }
    for (int y = h - 2; y >= 0; --y) {
      const std::size_t row = static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        g[row + x] = std::min(g[row + x], g[row + w + x] + 1);
      }
    }
    // Row pass, only where class c occurs.
    for (int y = 0; y < h; ++y) {
      if (!row_has_class[y]) continue;
      const std::size_t row = static_cast<std::size_t>(y) * w;
      envelope.run(std::span<const std::int64_t>(g).subspan(row, w), row_out);
      for (int x = 0; x < w; ++x) {
        if (ids[row + x] == c) squared[row + x] = row_out[x];
      }
    }
  }
  return DistanceField(w, h, std::move(squared), true);
}

ScalarField vbd_probability(const DistanceField& distance) {
  if (!distance.has_boundary()) {
    throw ValidationError("vbd_probability: label map has a single class, no boundary");
  }
  const auto d = distance.field().values();
  std::vector<double> p(d.size());
  std::transform(d.begin(), d.end(), p.begin(), [](double di) {
    const double u = di - 1.0;
    return std::exp(-u * u / 2.0);
  });
  return ScalarField(distance.width(), distance.height(), std::move(p));
}

BinaryMask boundary_mask_dt(const LabelMap& labels, int dt) {
  if (dt < 1) {
    throw ValidationError("boundary_mask_dt: dt must be >= 1, got " + std::to_string(dt));
  }
  const auto distance = distance_to_other_class(labels);
  if (!distance.has_boundary()) return BinaryMask::zeros(labels.width(), labels.height());
  const std::int64_t limit = static_cast<std::int64_t>(dt) * dt;
  const auto sq = distance.squared();
  std::vector<std::uint8_t> bits(sq.size());
  std::transform(sq.begin(), sq.end(), bits.begin(),
                 [limit](std::int64_t s) { return static_cast<std::uint8_t>(s <= limit); });
  return BinaryMask(labels.width(), labels.height(), std::move(bits));
}

ScalarField balance_weights(const BinaryMask& positives) {
  const std::size_t n = positives.size();
  const std::size_t n_pos = positives.count();
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("balance_weights: mask needs both positive and negative pixels");
  }
  const double w_pos = static_cast<double>(n) / (2.0 * static_cast<double>(n_pos));
  const double w_neg = static_cast<double>(n) / (2.0 * static_cast<double>(n_neg));
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = positives[i] ? w_pos : w_neg;
  return ScalarField(positives.width(), positives.height(), std::move(w));
}

BoundaryTargets make_boundary_targets(const LabelMap& labels, const TargetMode& mode) {
  const auto distance = distance_to_other_class(labels);
  if (!distance.has_boundary()) {
    throw ValidationError("make_boundary_targets: label map has a single class, no boundary");
  }
  const ScalarField p = vbd_probability(distance);
  const int w = labels.width();
  const int h = labels.height();
  const std::size_t n = p.size();

  std::vector<double> target(n);
  std::vector<std::uint8_t> positive(n);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SoftTargets>) {
          for (std::size_t i = 0; i < n; ++i) {
            target[i] = p[i];
            positive[i] = p[i] >= 0.5;
          }
        } else if constexpr (std::is_same_v<M, SampledTargets>) {
          Xoshiro256 rng(m.seed);
          for (std::size_t i = 0; i < n; ++i) {
            positive[i] = rng.bernoulli(p[i]);
            target[i] = positive[i];
          }
        } else {
          if (!(m.tau >= 0.0 && m.tau <= 1.0)) {
            throw ValidationError("make_boundary_targets: tau must lie in [0, 1]");
          }
          for (std::size_t i = 0; i < n; ++i) {
            positive[i] = p[i] >= m.tau;
            target[i] = positive[i];
          }
        }
      },
      mode);

  BinaryMask positives(w, h, std::move(positive));
  const std::size_t n_pos = positives.count();
  ScalarField weights = (n_pos == 0 || n_pos == n) ? ScalarField::filled(w, h, 1.0)
                                                   : balance_weights(positives);
  return BoundaryTargets{ScalarField(w, h, std::move(target)), std::move(weights),
                         std::move(positives)};
}

}  // namespace shapeseg
