#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both write only to pre-assigned per-row slots and perform
// per-row arithmetic in the same order, so their outputs are bitwise equal
// for any thread count.

#include <span>

#include "gala/types.hpp"

namespace gala {

enum class Exec { serial, parallel };

namespace kernels {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

// Scalar mean and population standard deviation of a vector's entries.
void vector_moments(std::span<const double> v, double& mean, double& stddev);

// Single-row forward pass. `feature` has model.feature_dim() slots, `probs`
// model.n_classes() slots.
void forward_row(const ModelState& model, std::span<const double> x, std::span<double> feature,
                 std::span<double> probs);

// Forward pass for dataset rows `rows`; output row i corresponds to rows[i].
void forward_rows(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                  Matrix& features, Matrix& probs, Exec exec);

// Index of the nearest centroid per point (lowest index on ties) and the
// squared distance to it.
void nearest_centroid(const Matrix& points, const Matrix& centroids, std::span<int> assignment,
                      std::span<double> dist2, Exec exec);

// dist2[i] = min(dist2[i], |points[i] - center|^2)
void relax_min_distance(const Matrix& points, std::span<const double> center, std::span<double> dist2,
                        Exec exec);

// Scalar mean and population standard deviation of each row.
void row_moments(const Matrix& vectors, std::span<double> mean, std::span<double> stddev, Exec exec);

namespace serial {
void forward_rows(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                  Matrix& features, Matrix& probs);
void nearest_centroid(const Matrix& points, const Matrix& centroids, std::span<int> assignment,
                      std::span<double> dist2);
void relax_min_distance(const Matrix& points, std::span<const double> center, std::span<double> dist2);
void row_moments(const Matrix& vectors, std::span<double> mean, std::span<double> stddev);
}  // namespace serial

namespace omp {
void forward_rows(const ModelState& model, const Matrix& inputs, std::span<const std::size_t> rows,
                  Matrix& features, Matrix& probs);
void nearest_centroid(const Matrix& points, const Matrix& centroids, std::span<int> assignment,
                      std::span<double> dist2);
void relax_min_distance(const Matrix& points, std::span<const double> center, std::span<double> dist2);
void row_moments(const Matrix& vectors, std::span<double> mean, std::span<double> stddev);
}  // namespace omp

}  // namespace kernels
}  // namespace gala
