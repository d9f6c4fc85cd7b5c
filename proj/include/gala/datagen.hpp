#pragma once

#include <cstdint>
#include <vector>

#include "gala/types.hpp"

namespace gala {

// Bounds of the per-domain affine transform x -> R * diag(s) * x + t.
struct DomainShift {
  double rotation = 0.5;     // max |angle| (radians) of each plane rotation
  double translation = 1.0;  // max |t_i|
  double log_scale = 0.2;    // max |log s_i|

  bool any() const { return rotation != 0.0 || translation != 0.0 || log_scale != 0.0; }
};

struct ScenarioConfig {
  int n_source_domains = 3;
  int samples_per_domain = 2000;
  int n_classes = 5;
  int feature_dim = 16;
  double class_separation = 3.0;
  DomainShift domain_shift{};
  double noise_sigma = 1.0;
  double label_skew = 0.3;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Held-out labels of the target rows.
struct AnswerKey {
  std::vector<std::size_t> rows;  // ascending dataset rows
  std::vector<int> labels;

  // kUnlabeled when the row is not covered.
  int label_of(std::size_t row) const;
  bool operator==(const AnswerKey&) const = default;
};

struct Affine {
  Matrix linear;  // d x d, applied as y = linear * x + offset
  std::vector<double> offset;
};

struct Scenario {
  Dataset dataset;
  AnswerKey answer_key;
  Matrix untransformed;  // features before the domain transform
  std::vector<Affine> transforms;  // one per domain, target last
};

// Class means: vertices of a regular simplex scaled to `class_separation`.
Matrix class_means(int n_classes, int feature_dim, double radius);

// Class counts of a domain: proportional to 1 + skew * cos(2 pi (c - domain) / C),
// rounded by largest remainder.
std::vector<int> class_counts(int n_samples, int n_classes, double label_skew, int domain);

Affine domain_transform(const ScenarioConfig& cfg, int domain);

Scenario generate(const ScenarioConfig& cfg);

// Copy of `ds` where the rows in `rows` take their answer-key labels.
Dataset annotate(Dataset ds, const AnswerKey& key, std::span<const std::size_t> rows);

}  // namespace gala
