#include "gala/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace gala {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

// Non-empty lines of a text buffer.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
    start = nl + 1;
  }
  return out;
}

std::unordered_map<std::int64_t, std::size_t> id_index(const Dataset& ds) {
  std::unordered_map<std::int64_t, std::size_t> m;
  for (std::size_t i = 0; i < ds.ids.size(); ++i) m.emplace(ds.ids[i], i);
  return m;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::Schema, "not a number: '" + std::string(s) + "'");
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::Schema, "not an integer: '" + std::string(s) + "'");
  return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "id,domain,label";
  for (std::size_t j = 0; j < ds.dim(); ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out += std::to_string(ds.ids[i]);
    out += ',';
    out += std::to_string(ds.domains[i]);
    out += ',';
    out += std::to_string(ds.labels[i]);
    for (double v : ds.features.row(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(std::string_view text, int n_source_domains, int n_classes) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Schema, "feature file is empty");
  const auto header = split_fields(lines[0]);
  if (header.size() < 4 || header[0] != "id" || header[1] != "domain" || header[2] != "label")
    throw Error(ErrorCode::Schema, "feature header must be id,domain,label,f0,...");
  const std::size_t d = header.size() - 3;
  for (std::size_t j = 0; j < d; ++j)
    if (header[3 + j] != "f" + std::to_string(j))
      throw Error(ErrorCode::Schema, "feature column " + std::to_string(j) + " must be named f" + std::to_string(j));

  Dataset ds;
  ds.features = Matrix(0, d);
  int max_domain = 0, max_label = -1;
  std::vector<double> row(d);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_fields(lines[li]);
    if (f.size() != header.size())
      throw Error(ErrorCode::Schema, "line " + std::to_string(li + 1) + " has " + std::to_string(f.size()) +
                                         " fields, expected " + std::to_string(header.size()));
    ds.ids.push_back(parse_int(f[0]));
    const int dom = static_cast<int>(parse_int(f[1]));
    const int lab = static_cast<int>(parse_int(f[2]));
    ds.domains.push_back(dom);
    ds.labels.push_back(lab);
    max_domain = std::max(max_domain, dom);
    max_label = std::max(max_label, lab);
    for (std::size_t j = 0; j < d; ++j) row[j] = parse_double(f[3 + j]);
    ds.features.append_row(row);
  }
  ds.n_source_domains = n_source_domains > 0 ? n_source_domains : max_domain;
  ds.n_classes = n_classes > 0 ? n_classes : std::max(2, max_label + 1);
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_csv(ds));
}

Dataset read_dataset_csv(const std::filesystem::path& path, int n_source_domains, int n_classes) {
  return dataset_from_csv(read_file(path), n_source_domains, n_classes);
}

std::string answer_key_to_csv(const Dataset& ds, const AnswerKey& key) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < key.rows.size(); ++i) {
    out += std::to_string(ds.ids[key.rows[i]]);
    out += ',';
    out += std::to_string(key.labels[i]);
    out += '\n';
  }
  return out;
}

AnswerKey answer_key_from_csv(std::string_view text, const Dataset& ds) {
  const auto lines = split_lines(text);
  if (lines.empty() || split_fields(lines[0]) != std::vector<std::string_view>{"id", "label"})
    throw Error(ErrorCode::Schema, "answer key header must be id,label");
  const auto index = id_index(ds);
  std::vector<std::pair<std::size_t, int>> entries;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_fields(lines[li]);
    if (f.size() != 2) throw Error(ErrorCode::Schema, "answer key line " + std::to_string(li + 1));
    const auto it = index.find(parse_int(f[0]));
    if (it == index.end()) throw Error(ErrorCode::Schema, "answer key id " + std::string(f[0]) + " not in features");
    const int lab = static_cast<int>(parse_int(f[1]));
    if (lab < 0 || lab >= ds.n_classes) throw Error(ErrorCode::Schema, "answer key label out of range");
    entries.emplace_back(it->second, lab);
  }
  std::sort(entries.begin(), entries.end());
  AnswerKey key;
  for (const auto& [row, lab] : entries) {
    if (!key.rows.empty() && key.rows.back() == row) throw Error(ErrorCode::Schema, "duplicate answer key id");
    key.rows.push_back(row);
    key.labels.push_back(lab);
  }
  return key;
}

void write_answer_key_csv(const Dataset& ds, const AnswerKey& key, const std::filesystem::path& path) {
  write_file_atomic(path, answer_key_to_csv(ds, key));
}

AnswerKey read_answer_key_csv(const std::filesystem::path& path, const Dataset& ds) {
  return answer_key_from_csv(read_file(path), ds);
}

Matrix probabilities_from_csv(std::string_view text, const Dataset& ds) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Schema, "probability file is empty");
  const auto header = split_fields(lines[0]);
  if (header.size() < 3 || header[0] != "id")
    throw Error(ErrorCode::Schema, "probability header must be id,p0,...,p{C-1}");
  const std::size_t c = header.size() - 1;
  for (std::size_t k = 0; k < c; ++k)
    if (header[1 + k] != "p" + std::to_string(k)) throw Error(ErrorCode::Schema, "probability column names");
  const auto index = id_index(ds);
  Matrix probs(ds.size(), c, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_fields(lines[li]);
    if (f.size() != header.size()) throw Error(ErrorCode::Schema, "probability line " + std::to_string(li + 1));
    const auto it = index.find(parse_int(f[0]));
    if (it == index.end()) throw Error(ErrorCode::Schema, "probability id " + std::string(f[0]) + " not in features");
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      const double p = parse_double(f[1 + k]);
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::Schema, "probability out of [0,1]");
      probs(it->second, k) = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw Error(ErrorCode::Schema, "probabilities of id " + std::string(f[0]) + " do not sum to 1");
  }
  return probs;
}

Matrix read_probabilities_csv(const std::filesystem::path& path, const Dataset& ds) {
  return probabilities_from_csv(read_file(path), ds);
}

}  // namespace gala
