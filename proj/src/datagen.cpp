#include "gala/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gala/rng.hpp"

namespace gala {

namespace {
constexpr std::uint64_t kTransformStream = 0x7472616e73ULL;
constexpr std::uint64_t kLabelStream = 0x6c6162656cULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
}  // namespace

void ScenarioConfig::validate() const {
  if (n_source_domains < 1) throw Error(ErrorCode::BadConfig, "need at least one source domain");
  if (samples_per_domain < 1) throw Error(ErrorCode::BadConfig, "samples_per_domain must be positive");
  if (n_classes < 2) throw Error(ErrorCode::BadConfig, "need at least two classes");
  if (feature_dim < 1) throw Error(ErrorCode::BadConfig, "feature_dim must be positive");
  if (n_classes > feature_dim) throw Error(ErrorCode::BadConfig, "class count may not exceed feature_dim");
  if (!(class_separation > 0.0)) throw Error(ErrorCode::BadConfig, "class_separation must be positive");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::BadConfig, "noise_sigma must be nonnegative");
  if (!(label_skew >= 0.0 && label_skew < 1.0)) throw Error(ErrorCode::BadConfig, "label_skew must lie in [0, 1)");
  const auto& s = domain_shift;
  if (!(s.rotation >= 0.0 && s.translation >= 0.0 && s.log_scale >= 0.0))
    throw Error(ErrorCode::BadConfig, "domain shift bounds must be nonnegative");
}

int AnswerKey::label_of(std::size_t row) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), row);
  if (it == rows.end() || *it != row) return kUnlabeled;
  return labels[static_cast<std::size_t>(it - rows.begin())];
}

Matrix class_means(int n_classes, int feature_dim, double radius) {
  Matrix m(n_classes, feature_dim);
  const double off = 1.0 / n_classes;
  const double norm = std::sqrt((1.0 - off) * (1.0 - off) + (n_classes - 1) * off * off);
  for (int c = 0; c < n_classes; ++c)
    for (int j = 0; j < n_classes; ++j) m(c, j) = radius * ((c == j ? 1.0 : 0.0) - off) / norm;
  return m;
}

std::vector<int> class_counts(int n_samples, int n_classes, double label_skew, int domain) {
  std::vector<double> w(n_classes);
  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    w[c] = 1.0 + label_skew * std::cos(2.0 * std::numbers::pi * (c - domain) / n_classes);
    total += w[c];
  }
  std::vector<int> counts(n_classes);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int c = 0; c < n_classes; ++c) {
    const double exact = n_samples * w[c] / total;
    counts[c] = static_cast<int>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - counts[c], c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < n_samples - assigned; ++i) ++counts[remainders[i].second];
  return counts;
}

Affine domain_transform(const ScenarioConfig& cfg, int domain) {
  const int d = cfg.feature_dim;
  Rng rng(mix_seed(cfg.rng_seed, {kTransformStream, static_cast<std::uint64_t>(domain)}));
  Affine a{Matrix(d, d), std::vector<double>(d, 0.0)};
  for (int i = 0; i < d; ++i) a.linear(i, i) = 1.0;
  if (d > 1) {
    for (int p = 0; p < d; ++p) {
      int q = static_cast<int>(rng.index(d - 1));
      if (q >= p) ++q;
      const double angle = rng.uniform(-1.0, 1.0) * cfg.domain_shift.rotation;
      const double c = std::cos(angle), s = std::sin(angle);
      for (int j = 0; j < d; ++j) {
        const double rp = a.linear(p, j), rq = a.linear(q, j);
        a.linear(p, j) = c * rp - s * rq;
        a.linear(q, j) = s * rp + c * rq;
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    const double scale = std::exp(rng.uniform(-1.0, 1.0) * cfg.domain_shift.log_scale);
    for (int i = 0; i < d; ++i) a.linear(i, j) *= scale;
  }
  for (int i = 0; i < d; ++i) a.offset[i] = rng.uniform(-1.0, 1.0) * cfg.domain_shift.translation;
  return a;
}

Scenario generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const int k_total = cfg.n_source_domains + 1;
  const int n = cfg.samples_per_domain;
  const int d = cfg.feature_dim;
  const Matrix means = class_means(cfg.n_classes, d, cfg.class_separation);

  Scenario sc;
  Dataset& ds = sc.dataset;
  ds.n_classes = cfg.n_classes;
  ds.n_source_domains = cfg.n_source_domains;
  ds.features = Matrix(static_cast<std::size_t>(k_total) * n, d);
  sc.untransformed = Matrix(static_cast<std::size_t>(k_total) * n, d);

  std::vector<double> latent(d);
  for (int dom = 0; dom < k_total; ++dom) {
    sc.transforms.push_back(domain_transform(cfg, dom));
    const Affine& tf = sc.transforms.back();
    const auto counts = class_counts(n, cfg.n_classes, cfg.label_skew, dom);
    std::vector<int> labels;
    for (int c = 0; c < cfg.n_classes; ++c) labels.insert(labels.end(), counts[c], c);
    Rng label_rng(mix_seed(cfg.rng_seed, {kLabelStream, static_cast<std::uint64_t>(dom)}));
    label_rng.shuffle(labels.begin(), labels.end());
    Rng noise_rng(mix_seed(cfg.rng_seed, {kNoiseStream, static_cast<std::uint64_t>(dom)}));

    for (int i = 0; i < n; ++i) {
      const std::size_t row = static_cast<std::size_t>(dom) * n + i;
      const int y = labels[i];
      for (int j = 0; j < d; ++j) latent[j] = means(y, j) + cfg.noise_sigma * noise_rng.normal();
      std::copy(latent.begin(), latent.end(), sc.untransformed.row(row).begin());
      auto out = ds.features.row(row);
      for (int r = 0; r < d; ++r) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += tf.linear(r, j) * latent[j];
        out[r] = s + tf.offset[r];
      }
      ds.ids.push_back(static_cast<std::int64_t>(row));
      ds.domains.push_back(dom);
      if (dom == cfg.n_source_domains) {
        ds.labels.push_back(kUnlabeled);
        sc.answer_key.rows.push_back(row);
        sc.answer_key.labels.push_back(y);
      } else {
        ds.labels.push_back(y);
      }
    }
  }
  validate_dataset(ds);
  return sc;
}

Dataset annotate(Dataset ds, const AnswerKey& key, std::span<const std::size_t> rows) {
  for (auto r : rows) {
    const int lab = key.label_of(r);
    if (lab == kUnlabeled) throw Error(ErrorCode::BadId, "row " + std::to_string(r) + " is not in the answer key");
    ds.labels[r] = lab;
  }
  return ds;
}

}  // namespace gala
