#pragma once

#include <span>
#include <vector>

#include "gala/kernels.hpp"
#include "gala/types.hpp"

namespace gala {

struct ForwardResult {
  std::vector<double> feature;  // pre-last-layer representation
  std::vector<double> probs;
};

// Throws ShapeMismatch on width mismatch and NonFinite on non-finite input.
ForwardResult forward(const ModelState& model, std::span<const double> x);

// Per-sample quantities consumed by selection. grad_embed is the pseudo-label
// block of the last-layer gradient of the cross-entropy, stored with positive
// sign: feature * (1 - p_hat).
struct EmbeddingBundle {
  std::size_t sample_id = 0;
  std::vector<double> feature;
  std::vector<double> probs;
  int pseudo_label = 0;
  std::vector<double> grad_embed;
  double uncertainty = 0.0;  // ||grad_embed||_2
};

EmbeddingBundle gradient_embedding(std::span<const double> feature, std::span<const double> probs);

// One bundle per id, in id order. Throws BadId for rows outside the dataset.
std::vector<EmbeddingBundle> embed_all(const ModelState& model, const Dataset& ds,
                                       std::span<const std::size_t> ids, Exec exec = Exec::parallel);

// Bundles from externally supplied probabilities, using the dataset features
// as the representation. probs row i belongs to dataset row i.
std::vector<EmbeddingBundle> embed_from_probs(const Dataset& ds, const Matrix& probs,
                                              std::span<const std::size_t> ids);

// Stacks the requested embedding of each bundle as matrix rows.
Matrix stack_embeddings(std::span<const EmbeddingBundle> bundles, EmbeddingSpace space);

}  // namespace gala
