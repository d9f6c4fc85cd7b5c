#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gala/datagen.hpp"
#include "gala/types.hpp"

namespace gala {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

// Writes via a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Feature CSV: header `id,domain,label,f0,...,f{d-1}`, label -1 = unlabeled.
std::string dataset_to_csv(const Dataset& ds);
// K defaults to the largest domain id (the target) and C to max label + 1
// (at least 2) when not given.
Dataset dataset_from_csv(std::string_view text, int n_source_domains = 0, int n_classes = 0);
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path, int n_source_domains = 0, int n_classes = 0);

// Answer key CSV: header `id,label`, one line per target row.
std::string answer_key_to_csv(const Dataset& ds, const AnswerKey& key);
AnswerKey answer_key_from_csv(std::string_view text, const Dataset& ds);
void write_answer_key_csv(const Dataset& ds, const AnswerKey& key, const std::filesystem::path& path);
AnswerKey read_answer_key_csv(const std::filesystem::path& path, const Dataset& ds);

// Probability CSV: header `id,p0,...,p{C-1}`; rows are matched to the dataset
// by id. Rows absent from the file stay NaN.
Matrix probabilities_from_csv(std::string_view text, const Dataset& ds);
Matrix read_probabilities_csv(const std::filesystem::path& path, const Dataset& ds);

}  // namespace gala
