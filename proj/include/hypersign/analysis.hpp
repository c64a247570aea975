#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/graph.hpp"
#include "hypersign/manifold.hpp"
#include "hypersign/rng.hpp"

namespace hypersign {

struct BandSummary {
  std::size_t band = 0;  // 0 = innermost
  std::vector<std::uint32_t> nodes;
  double mean_pos_degree = 0;
  double mean_neg_degree = 0;
  double degree_ratio = 0;  // +inf when the band has no negative degree
  double mean_norm = 0;
};

// Quantile banding by embedding norm: nodes sorted by norm, cut into
// band_count contiguous groups of (near-)equal size, remainder going to
// the inner bands. Degree statistics count real edges only.
inline std::vector<BandSummary> radius_bands(const EmbeddingStore& store,
                                             const SignedGraph& graph,
                                             std::size_t band_count) {
  const std::size_t n = graph.node_count();
  if (store.rows() != n)
    throw Error("embedding row count does not match graph node count");
  if (band_count == 0 || band_count > n)
    throw Error("band count must lie in [1, N]");

  std::vector<std::uint32_t> order(n);
  for (std::uint32_t v = 0; v < n; ++v) order[v] = v;
  std::vector<double> norms(n);
  for (std::uint32_t v = 0; v < n; ++v) norms[v] = store.row_norm(v);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return norms[a] != norms[b] ? norms[a] < norms[b] : a < b;
  });

  std::vector<BandSummary> bands(band_count);
  std::size_t base = n / band_count, extra = n % band_count;
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < band_count; ++b) {
    std::size_t size = base + (b < extra ? 1 : 0);
    BandSummary& band = bands[b];
    band.band = b;
    double pos_sum = 0, neg_sum = 0, norm_sum = 0;
    for (std::size_t i = 0; i < size; ++i) {
      std::uint32_t v = order[cursor++];
      band.nodes.push_back(v);
      pos_sum += static_cast<double>(graph.neighbors(v, +1).size());
      neg_sum += static_cast<double>(graph.neighbors(v, -1).size());
      norm_sum += norms[v];
    }
    auto denom = static_cast<double>(size);
    band.mean_pos_degree = pos_sum / denom;
    band.mean_neg_degree = neg_sum / denom;
    band.degree_ratio = band.mean_neg_degree > 0
                            ? band.mean_pos_degree / band.mean_neg_degree
                            : std::numeric_limits<double>::infinity();
    band.mean_norm = norm_sum / denom;
  }
  return bands;
}

struct ProfileRow {
  std::uint32_t node = 0;
  double norm = 0;
  double mean_distance = 0;  // to all other nodes (or a seeded sample)
};

// Per-node (norm, mean Poincare distance to the rest), sorted by norm.
// Exact all-pairs is O(N^2); above `exact_cutoff` nodes the mean is
// estimated from `sample_size` seeded draws per node.
inline std::vector<ProfileRow> centrality_profile(const EmbeddingStore& store,
                                                  std::size_t exact_cutoff = 2000,
                                                  std::size_t sample_size = 512,
                                                  std::uint64_t seed = 0) {
  const std::size_t n = store.rows();
  if (n < 2) throw Error("centrality profile needs at least 2 nodes");

  std::vector<ProfileRow> rows(n);
  bool exact = n <= exact_cutoff;
  RandomEngine rng(derive_seed(seed, RngStream::analysis));
  for (std::uint32_t v = 0; v < n; ++v) {
    rows[v].node = v;
    rows[v].norm = store.row_norm(v);
    double sum = 0;
    if (exact) {
      for (std::uint32_t u = 0; u < n; ++u)
        if (u != v) sum += poincare_distance(store.row(v), store.row(u));
      rows[v].mean_distance = sum / static_cast<double>(n - 1);
    } else {
      std::size_t drawn = 0;
      while (drawn < sample_size) {
        auto u = static_cast<std::uint32_t>(rng.index(n));
        if (u == v) continue;
        sum += poincare_distance(store.row(v), store.row(u));
        ++drawn;
      }
      rows[v].mean_distance = sum / static_cast<double>(sample_size);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ProfileRow& a, const ProfileRow& b) {
    return a.norm != b.norm ? a.norm < b.norm : a.node < b.node;
  });
  return rows;
}

struct PowerLawFit {
  double exponent = 0;  // count(k) ~ k^(-exponent)
  std::size_t degree_min = 0;
  std::size_t degree_max = 0;
  double r_squared = 0;
  std::size_t support_points = 0;
};

// Log-log least squares over the histogram tail, a plotting diagnostic
// rather than a calibrated estimator.
inline PowerLawFit powerlaw_summary(const std::map<std::size_t, std::size_t>& histogram,
                                    std::size_t degree_min = 1) {
  std::vector<double> xs, ys;
  PowerLawFit fit;
  fit.degree_min = std::numeric_limits<std::size_t>::max();
  for (const auto& [degree, count] : histogram) {
    if (degree < degree_min || degree < 1 || count == 0) continue;
    xs.push_back(std::log(static_cast<double>(degree)));
    ys.push_back(std::log(static_cast<double>(count)));
    fit.degree_min = std::min(fit.degree_min, degree);
    fit.degree_max = std::max(fit.degree_max, degree);
  }
  if (xs.size() < 3)
    throw Error("power-law fit needs at least 3 distinct degrees >= " +
                std::to_string(degree_min));

  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  double slope = sxy / sxx;
  fit.exponent = -slope;
  fit.support_points = xs.size();
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (my + slope * (xs[i] - mx));
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace hypersign
