#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace msrobust {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<std::size_t>;

/// Raised when a dataset or pool would violate one of its invariants.
class InvalidData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Feature matrix with signed binary labels (-1/+1).
///
/// Immutable once built; the constructor rejects ragged shapes, labels other
/// than -1/+1 and non-finite feature values. A dataset may have zero rows but
/// always has at least one feature column.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<int> labels, std::string source_id = {});

  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::string& source_id() const noexcept { return source_id_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  bool empty() const noexcept { return labels_.empty(); }

  auto row(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)); }
  int label(std::size_t i) const { return labels_[i]; }

  /// Rows picked by index, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset with_labels(std::vector<int> labels) const;
  Dataset with_features(Matrix features) const;
  Dataset with_source_id(std::string id) const;

  /// Row-wise concatenation; all parts must share n_features.
  static Dataset concat(std::span<const Dataset> parts, std::string source_id = {});

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::string source_id_;
};

/// N untrusted sources plus the trusted reference sample.
class SourcePool {
 public:
  SourcePool(std::vector<Dataset> sources, Dataset reference);

  const std::vector<Dataset>& sources() const noexcept { return sources_; }
  const Dataset& source(std::size_t i) const { return sources_.at(i); }
  const Dataset& reference() const noexcept { return reference_; }
  std::size_t n_sources() const noexcept { return sources_.size(); }
  std::size_t n_features() const noexcept { return reference_.n_features(); }
  std::vector<std::size_t> sample_counts() const;

  /// Pool whose sources are the current sources followed by the reference.
  SourcePool with_reference_as_source() const;
  SourcePool with_reference(Dataset reference) const;
  SourcePool with_sources(std::vector<Dataset> sources) const;

 private:
  std::vector<Dataset> sources_;
  Dataset reference_;
};

enum class LabelEncoding {
  signed_labels,  // -1 / +1 as written
  zero_one,       // 0 -> -1, 1 -> +1
};

class CsvError : public std::runtime_error {
 public:
  enum class Kind { missing_file, missing_column, bad_number, bad_label, ragged_row, empty_file, io };

  CsvError(Kind kind, std::string message, std::size_t row = 0, std::string column = {});

  Kind kind() const noexcept { return kind_; }
  /// 1-based data row (header and comments excluded); 0 when not row specific.
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t row_;
  std::string column_;
};

/// Reads a headered CSV. Every column other than `label_column` is a feature,
/// in file order. Lines starting with '#' are skipped.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column = "label",
                 LabelEncoding encoding = LabelEncoding::signed_labels);

/// Writes features as x0..x{d-1} followed by the label column, 17 significant digits.
void save_csv(const Dataset& data, const std::filesystem::path& path,
              const std::string& label_column = "label",
              LabelEncoding encoding = LabelEncoding::signed_labels);

/// Random partition with part sizes from largest-remainder rounding.
std::vector<Dataset> split(const Dataset& data, std::span<const double> fractions, std::uint64_t seed);

/// Index-level form of split(); the parts concatenated are a permutation of 0..n-1.
std::vector<IndexList> split_indices(std::size_t n, std::span<const double> fractions, std::uint64_t seed);

/// k disjoint folds covering 0..n-1 whose sizes differ by at most one.
std::vector<IndexList> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

/// Complement of `fold` in 0..n-1, ascending.
IndexList complement_indices(std::size_t n, const IndexList& fold);

}  // namespace msrobust
