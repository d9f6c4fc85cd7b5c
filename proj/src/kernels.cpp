#include "gala/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gala::kernels {

namespace {

inline void softmax_inplace(std::span<double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

inline void nearest_one(const Matrix& points, const Matrix& centroids, std::size_t i, int& best,
                        double& best_d) {
  const auto p = points.row(i);
  best = 0;
  best_d = squared_distance(p, centroids.row(0));
  for (std::size_t c = 1; c < centroids.rows(); ++c) {
    const double d = squared_distance(p, centroids.row(c));
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
}

}  // namespace

void vector_moments(std::span<const double> v, double& mean, double& stddev) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mu = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  mean = mu;
  stddev = std::sqrt(ss / static_cast<double>(v.size()));
}

void forward_row(const ModelState& model, std::span<const double> x, std::span<double> feature,
                 std::span<double> probs) {
  if (model.has_hidden()) {
    const auto& w = model.hidden_weights;
    const std::size_t h = w.cols();
    for (std::size_t j = 0; j < h; ++j) feature[j] = model.hidden_bias[j];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double xi = x[i];
      const auto wr = w.row(i);
      for (std::size_t j = 0; j < h; ++j) feature[j] += xi * wr[j];
    }
    for (std::size_t j = 0; j < h; ++j) feature[j] = std::max(0.0, feature[j]);
  } else {
    std::copy(x.begin(), x.end(), feature.begin());
  }
  const auto& w = model.last_weights;
  const std::size_t c = w.cols();
  for (std::size_t k = 0; k < c; ++k) probs[k] = model.last_bias[k];
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double fi = feature[i];
    const auto wr = w.row(i);
    for (std::size_t k = 0; k < c; ++k) probs[k] += fi * wr[k];
  }
  softmax_inplace(probs);
}

namespace serial {

void forward_rows(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                  Matrix& features, Matrix& probs) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    forward_row(model, inputs.row(rows[i]), features.row(i), probs.row(i));
}

void nearest_centroid(const Matrix& points, const Matrix& centroids, std::span<int> assignment,
                      std::span<double> dist2) {
  for (std::size_t i = 0; i < points.rows(); ++i) nearest_one(points, centroids, i, assignment[i], dist2[i]);
}

void relax_min_distance(const Matrix& points, std::span<const double> center, std::span<double> dist2) {
  for (std::size_t i = 0; i < points.rows(); ++i)
    dist2[i] = std::min(dist2[i], squared_distance(points.row(i), center));
}

void row_moments(const Matrix& vectors, std::span<double> mean, std::span<double> stddev) {
  for (std::size_t i = 0; i < vectors.rows(); ++i) vector_moments(vectors.row(i), mean[i], stddev[i]);
}

}  // namespace serial

namespace omp {

void forward_rows(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                  Matrix& features, Matrix& probs) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    forward_row(model, inputs.row(rows[i]), features.row(i), probs.row(i));
}

void nearest_centroid(const Matrix& points, const Matrix& centroids, std::span<int> assignment,
                      std::span<double> dist2) {
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) nearest_one(points, centroids, i, assignment[i], dist2[i]);
}

void relax_min_distance(const Matrix& points, std::span<const double> center, std::span<double> dist2) {
  const auto n = static_cast<std::ptrdiff_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    dist2[i] = std::min(dist2[i], squared_distance(points.row(i), center));
}

void row_moments(const Matrix& vectors, std::span<double> mean, std::span<double> stddev) {
  const auto n = static_cast<std::ptrdiff_t>(vectors.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) vector_moments(vectors.row(i), mean[i], stddev[i]);
}

}  // namespace omp

void forward_rows(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                  Matrix& features, Matrix& probs, Exec exec) {
  if (exec == Exec::parallel)
    omp::forward_rows(model, inputs, rows, features, probs);
  else
    serial::forward_rows(model, inputs, rows, features, probs);
}

void nearest_centroid(const Matrix& points, const Matrix& centroids, std::span<int> assignment,
                      std::span<double> dist2, Exec exec) {
  if (exec == Exec::parallel)
    omp::nearest_centroid(points, centroids, assignment, dist2);
  else
    serial::nearest_centroid(points, centroids, assignment, dist2);
}

void relax_min_distance(const Matrix& points, std::span<const double> center, std::span<double> dist2,
                        Exec exec) {
  if (exec == Exec::parallel)
    omp::relax_min_distance(points, center, dist2);
  else
    serial::relax_min_distance(points, center, dist2);
}

void row_moments(const Matrix& vectors, std::span<double> mean, std::span<double> stddev, Exec exec) {
  if (exec == Exec::parallel)
    omp::row_moments(vectors, mean, stddev);
  else
    serial::row_moments(vectors, mean, stddev);
}

}  // namespace gala::kernels
