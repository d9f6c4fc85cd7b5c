#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gala/rng.hpp"
#include "gala/types.hpp"

namespace testutil {

using gala::Dataset;
using gala::Matrix;
using gala::ModelState;
using gala::Rng;

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

inline ModelState random_model(Rng& rng, std::size_t d, std::size_t h, std::size_t c, double scale = 0.7) {
  ModelState m;
  std::size_t f = d;
  if (h > 0) {
    m.hidden_weights = random_matrix(rng, d, h, scale);
    m.hidden_bias.resize(h);
    for (double& v : m.hidden_bias) v = 0.3 * rng.normal();
    f = h;
  }
  m.last_weights = random_matrix(rng, f, c, scale);
  m.last_bias.resize(c);
  for (double& v : m.last_bias) v = 0.3 * rng.normal();
  return m;
}

// Sources 0..K-1 with n_src rows each, then n_t unlabeled target rows.
inline Dataset random_dataset(Rng& rng, int k, int n_src, int n_t, std::size_t d, int c) {
  Dataset ds;
  ds.n_classes = c;
  ds.n_source_domains = k;
  ds.features = Matrix(0, d);
  std::vector<double> row(d);
  auto add = [&](int dom, int lab) {
    for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal() + 0.5 * dom;
    ds.features.append_row(row);
    ds.ids.push_back(static_cast<std::int64_t>(ds.ids.size()));
    ds.domains.push_back(dom);
    ds.labels.push_back(lab);
  };
  for (int dom = 0; dom < k; ++dom)
    for (int i = 0; i < n_src; ++i) add(dom, static_cast<int>(rng.index(c)));
  for (int i = 0; i < n_t; ++i) add(k, gala::kUnlabeled);
  return ds;
}

// Straightforward forward pass: hidden ReLU layer (if any), then softmax.
struct Forward {
  std::vector<double> feature, logits, probs;
};

inline Forward naive_forward(const ModelState& m, std::span<const double> x) {
  Forward out;
  if (m.has_hidden()) {
    out.feature.assign(m.hidden_weights.cols(), 0.0);
    for (std::size_t k = 0; k < out.feature.size(); ++k) {
      double s = m.hidden_bias[k];
      for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * m.hidden_weights(j, k);
      out.feature[k] = s > 0.0 ? s : 0.0;
    }
  } else {
    out.feature.assign(x.begin(), x.end());
  }
  const std::size_t c = m.last_weights.cols();
  out.logits.assign(c, 0.0);
  for (std::size_t k = 0; k < c; ++k) {
    double s = m.last_bias[k];
    for (std::size_t j = 0; j < out.feature.size(); ++j) s += out.feature[j] * m.last_weights(j, k);
    out.logits[k] = s;
  }
  const double mx = *std::max_element(out.logits.begin(), out.logits.end());
  double z = 0.0;
  out.probs.resize(c);
  for (std::size_t k = 0; k < c; ++k) z += (out.probs[k] = std::exp(out.logits[k] - mx));
  for (double& p : out.probs) p /= z;
  return out;
}

inline double naive_ce(const ModelState& m, std::span<const double> x, int y) {
  const auto f = naive_forward(m, x);
  const double mx = *std::max_element(f.logits.begin(), f.logits.end());
  double z = 0.0;
  for (double l : f.logits) z += std::exp(l - mx);
  return -(f.logits[y] - mx - std::log(z));
}

inline int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline double rel_err(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Brute-force k-means objective of an assignment using recomputed means.
inline double objective_with_means(const Matrix& pts, const std::vector<int>& assign, int k) {
  const std::size_t d = pts.cols();
  std::vector<std::vector<double>> sum(k, std::vector<double>(d, 0.0));
  std::vector<int> cnt(k, 0);
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    ++cnt[assign[i]];
    for (std::size_t j = 0; j < d; ++j) sum[assign[i]][j] += pts(i, j);
  }
  double j_total = 0.0;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    const int c = assign[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double t = pts(i, j) - sum[c][j] / cnt[c];
      j_total += t * t;
    }
  }
  return j_total;
}

// Smallest objective reachable by moving one point to another cluster
// (donor must keep at least one member).
inline double best_single_move(const Matrix& pts, std::vector<int> assign, int k) {
  std::vector<int> cnt(k, 0);
  for (int a : assign) ++cnt[a];
  double best = objective_with_means(pts, assign, k);
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    const int from = assign[i];
    if (cnt[from] < 2) continue;
    for (int to = 0; to < k; ++to) {
      if (to == from) continue;
      assign[i] = to;
      best = std::min(best, objective_with_means(pts, assign, k));
      assign[i] = from;
    }
  }
  return best;
}

}  // namespace testutil
