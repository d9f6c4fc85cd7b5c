#include "gala/embedding.hpp"

#include <cmath>

namespace gala {

ForwardResult forward(const ModelState& model, std::span<const double> x) {
  if (x.size() != model.input_dim())
    throw Error(ErrorCode::ShapeMismatch,
                "input width " + std::to_string(x.size()) + " != model input " +
                    std::to_string(model.input_dim()));
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "input row has a non-finite entry");
  ForwardResult out{std::vector<double>(model.feature_dim()), std::vector<double>(model.n_classes())};
  kernels::forward_row(model, x, out.feature, out.probs);
  return out;
}

EmbeddingBundle gradient_embedding(std::span<const double> feature, std::span<const double> probs) {
  if (feature.empty()) throw Error(ErrorCode::EmptyFeature, "feature vector is empty");
  if (probs.empty()) throw Error(ErrorCode::ShapeMismatch, "probability vector is empty");
  EmbeddingBundle b;
  b.feature.assign(feature.begin(), feature.end());
  b.probs.assign(probs.begin(), probs.end());
  int top = 0;
  for (std::size_t c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[top]) top = static_cast<int>(c);
  b.pseudo_label = top;
  const double scale = 1.0 - probs[top];
  b.grad_embed.resize(feature.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    b.grad_embed[i] = feature[i] * scale;
    ss += b.grad_embed[i] * b.grad_embed[i];
  }
  b.uncertainty = std::sqrt(ss);
  return b;
}

std::vector<EmbeddingBundle> embed_all(const ModelState& model, const Dataset& ds,
                                       std::span<const std::size_t> ids, Exec exec) {
  for (auto id : ids)
    if (id >= ds.size()) throw Error(ErrorCode::BadId, "row " + std::to_string(id) + " out of range");
  if (ids.empty()) return {};
  if (ds.dim() != model.input_dim())
    throw Error(ErrorCode::ShapeMismatch, "dataset width does not match model input");
  Matrix features(ids.size(), model.feature_dim());
  Matrix probs(ids.size(), model.n_classes());
  kernels::forward_rows(model, ds.features, ids, features, probs, exec);
  std::vector<EmbeddingBundle> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i] = gradient_embedding(features.row(i), probs.row(i));
    out[i].sample_id = ids[i];
  }
  return out;
}

std::vector<EmbeddingBundle> embed_from_probs(const Dataset& ds, const Matrix& probs,
                                              std::span<const std::size_t> ids) {
  if (probs.rows() != ds.size()) throw Error(ErrorCode::ShapeMismatch, "one probability row per sample");
  std::vector<EmbeddingBundle> out;
  out.reserve(ids.size());
  for (auto id : ids) {
    if (id >= ds.size()) throw Error(ErrorCode::BadId, "row " + std::to_string(id) + " out of range");
    out.push_back(gradient_embedding(ds.features.row(id), probs.row(id)));
    out.back().sample_id = id;
  }
  return out;
}

Matrix stack_embeddings(std::span<const EmbeddingBundle> bundles, EmbeddingSpace space) {
  if (bundles.empty()) return {};
  const std::size_t d = bundles.front().feature.size();
  Matrix m(bundles.size(), d);
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const auto& src = space == EmbeddingSpace::gradient ? bundles[i].grad_embed : bundles[i].feature;
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return m;
}

}  // namespace gala
