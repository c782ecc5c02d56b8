#include "msrobust/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "msrobust/rng.hpp"

namespace msrobust {

Dataset::Dataset(Matrix features, std::vector<int> labels, std::string source_id)
    : features_(std::move(features)), labels_(std::move(labels)), source_id_(std::move(source_id)) {
  if (features_.cols() < 1) throw InvalidData("dataset needs at least one feature column");
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw InvalidData("dataset has " + std::to_string(features_.rows()) + " feature rows but " +
                      std::to_string(labels_.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != -1 && labels_[i] != 1) {
      throw InvalidData("label at row " + std::to_string(i) + " is " + std::to_string(labels_[i]) +
                        ", expected -1 or +1");
    }
  }
  if (!features_.allFinite()) throw InvalidData("dataset contains non-finite feature values");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix x(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<int> y(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size()) throw std::out_of_range("subset index out of range");
    x.row(static_cast<Eigen::Index>(k)) = features_.row(static_cast<Eigen::Index>(indices[k]));
    y[k] = labels_[indices[k]];
  }
  return Dataset(std::move(x), std::move(y), source_id_);
}

Dataset Dataset::with_labels(std::vector<int> labels) const {
  return Dataset(features_, std::move(labels), source_id_);
}

Dataset Dataset::with_features(Matrix features) const {
  return Dataset(std::move(features), labels_, source_id_);
}

Dataset Dataset::with_source_id(std::string id) const {
  return Dataset(features_, labels_, std::move(id));
}

Dataset Dataset::concat(std::span<const Dataset> parts, std::string source_id) {
  if (parts.empty()) throw InvalidData("cannot concatenate zero datasets");
  const auto d = parts.front().features().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.features().cols() != d) throw InvalidData("concatenated datasets differ in n_features");
    rows += p.features().rows();
  }
  Matrix x(rows, d);
  std::vector<int> y;
  y.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    x.middleRows(at, p.features().rows()) = p.features();
    at += p.features().rows();
    y.insert(y.end(), p.labels().begin(), p.labels().end());
  }
  return Dataset(std::move(x), std::move(y), std::move(source_id));
}

SourcePool::SourcePool(std::vector<Dataset> sources, Dataset reference)
    : sources_(std::move(sources)), reference_(std::move(reference)) {
  if (sources_.empty()) throw InvalidData("source pool needs at least one source");
  if (reference_.empty()) throw InvalidData("reference dataset is empty");
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    if (sources_[i].n_features() != reference_.n_features()) {
      throw InvalidData("source " + std::to_string(i) + " has " + std::to_string(sources_[i].n_features()) +
                        " features, reference has " + std::to_string(reference_.n_features()));
    }
    if (sources_[i].empty()) throw InvalidData("source " + std::to_string(i) + " is empty");
  }
}

std::vector<std::size_t> SourcePool::sample_counts() const {
  std::vector<std::size_t> m;
  m.reserve(sources_.size());
  for (const auto& s : sources_) m.push_back(s.size());
  return m;
}

SourcePool SourcePool::with_reference_as_source() const {
  auto sources = sources_;
  sources.push_back(reference_);
  return SourcePool(std::move(sources), reference_);
}

SourcePool SourcePool::with_reference(Dataset reference) const {
  return SourcePool(sources_, std::move(reference));
}

SourcePool SourcePool::with_sources(std::vector<Dataset> sources) const {
  return SourcePool(std::move(sources), reference_);
}

// ---------------------------------------------------------------------------
// CSV

CsvError::CsvError(Kind kind, std::string message, std::size_t row, std::string column)
    : std::runtime_error(std::move(message)), kind_(kind), row_(row), column_(std::move(column)) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool is_skippable(std::string_view line) {
  auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column, LabelEncoding encoding) {
  std::ifstream in(path);
  if (!in) throw CsvError(CsvError::Kind::missing_file, "cannot open " + path.string());

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (is_skippable(line)) continue;
    for (auto f : split_fields(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw CsvError(CsvError::Kind::empty_file, path.string() + " has no header row");

  auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw CsvError(CsvError::Kind::missing_column, "label column '" + label_column + "' not found in " + path.string(),
                   0, label_column);
  }
  const auto label_pos = static_cast<std::size_t>(label_it - header.begin());
  const std::size_t n_cols = header.size();
  if (n_cols < 2) throw CsvError(CsvError::Kind::missing_column, path.string() + " has no feature columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (is_skippable(line)) continue;
    ++row;
    auto fields = split_fields(line);
    if (fields.size() != n_cols) {
      throw CsvError(CsvError::Kind::ragged_row,
                     "row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(n_cols),
                     row);
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      double v = 0.0;
      const bool ok = parse_double(fields[c], v);
      if (c == label_pos) {
        int label = 0;
        if (ok && encoding == LabelEncoding::signed_labels && (v == 1.0 || v == -1.0)) {
          label = static_cast<int>(v);
        } else if (ok && encoding == LabelEncoding::zero_one && (v == 0.0 || v == 1.0)) {
          label = v == 1.0 ? 1 : -1;
        } else {
          throw CsvError(CsvError::Kind::bad_label,
                         "row " + std::to_string(row) + ", column '" + header[c] + "': label '" +
                             std::string(fields[c]) + "' outside the declared encoding",
                         row, header[c]);
        }
        labels.push_back(label);
      } else {
        if (!ok || !std::isfinite(v)) {
          throw CsvError(CsvError::Kind::bad_number,
                         "row " + std::to_string(row) + ", column '" + header[c] + "': cannot parse '" +
                             std::string(fields[c]) + "' as a finite number",
                         row, header[c]);
        }
        values.push_back(v);
      }
    }
  }

  const auto d = static_cast<Eigen::Index>(n_cols - 1);
  Matrix x(static_cast<Eigen::Index>(labels.size()), d);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = values[static_cast<std::size_t>(r * d + c)];
  return Dataset(std::move(x), std::move(labels), path.stem().string());
}

void save_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_column,
              LabelEncoding encoding) {
  std::ofstream out(path);
  if (!out) throw CsvError(CsvError::Kind::io, "cannot write " + path.string());
  for (std::size_t c = 0; c < data.n_features(); ++c) out << 'x' << c << ',';
  out << label_column << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.n_features(); ++c) {
      out << format_double(data.features()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) << ',';
    }
    const int y = data.label(r);
    out << (encoding == LabelEncoding::zero_one ? (y == 1 ? 1 : 0) : y) << '\n';
  }
  if (!out) throw CsvError(CsvError::Kind::io, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Splitting

std::vector<IndexList> split_indices(std::size_t n, std::span<const double> fractions, std::uint64_t seed) {
  if (fractions.empty()) throw std::invalid_argument("split needs at least one fraction");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("split fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");
  if (n < fractions.size()) throw std::invalid_argument("dataset has fewer samples than requested parts");

  // Largest remainder: floor every quota, then hand the leftovers to the
  // largest fractional parts (earlier part wins ties).
  const std::size_t k = fractions.size();
  std::vector<std::size_t> sizes(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = fractions[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    remainder[i] = quota - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
  for (std::size_t j = 0; assigned < n; ++j, ++assigned) ++sizes[order[j % k]];
  for (std::size_t j = 0; assigned > n; ++j) {
    auto& s = sizes[order[k - 1 - (j % k)]];
    if (s > 0) --s, --assigned;
  }

  Rng rng(seed);
  auto perm = random_permutation(n, rng);
  std::vector<IndexList> parts(k);
  std::size_t at = 0;
  for (std::size_t i = 0; i < k; ++i) {
    parts[i].assign(perm.begin() + static_cast<std::ptrdiff_t>(at),
                    perm.begin() + static_cast<std::ptrdiff_t>(at + sizes[i]));
    at += sizes[i];
  }
  return parts;
}

std::vector<Dataset> split(const Dataset& data, std::span<const double> fractions, std::uint64_t seed) {
  std::vector<Dataset> out;
  for (const auto& idx : split_indices(data.size(), fractions, seed)) out.push_back(data.subset(idx));
  return out;
}

std::vector<IndexList> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold needs k >= 2");
  if (k > n) throw std::invalid_argument("kfold: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  Rng rng(seed);
  auto perm = random_permutation(n, rng);
  std::vector<IndexList> folds(k);
  const std::size_t base = n / k, extra = n % k;
  std::size_t at = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(at), perm.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  return folds;
}

IndexList complement_indices(std::size_t n, const IndexList& fold) {
  std::vector<char> held(n, 0);
  for (auto i : fold) held.at(i) = 1;
  IndexList out;
  out.reserve(n - fold.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!held[i]) out.push_back(i);
  return out;
}

}  // namespace msrobust
