#pragma once

// Tabular classification data: typed features, CSV loading, repeated
// stratified fold plans, and the per-split encoders used by the learners.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace intstab::data {

/// Raised for malformed input files and violated dataset invariants.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FeatureKind { numeric, categorical };

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> categories;  // categorical only

    bool is_categorical() const { return kind == FeatureKind::categorical; }
    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Category assigned to missing categorical cells.
inline constexpr const char* kMissingCategory = "__missing__";

/// Row-major n x d table. Categorical cells hold the category index, numeric
/// cells the value; a missing numeric cell is NaN. Labels index class_names,
/// which are kept in lexicographic order.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<FeatureSpec> features, std::vector<double> cells,
            std::vector<int> labels, std::vector<std::string> class_names);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return features_.size(); }
    std::size_t class_count() const { return class_names_.size(); }

    double at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
    std::span<const double> row(std::size_t r) const {
        return {cells_.data() + r * cols(), cols()};
    }
    int label(std::size_t r) const { return labels_[r]; }

    const std::vector<FeatureSpec>& features() const { return features_; }
    const FeatureSpec& feature(std::size_t c) const { return features_[c]; }
    const std::vector<double>& cells() const { return cells_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<std::string>& class_names() const { return class_names_; }

    /// Per-class row counts, indexed like class_names.
    std::vector<std::size_t> class_counts() const;
    bool all_categorical() const;

    /// Rows in the given order (indices may repeat).
    Dataset subset(std::span<const std::size_t> row_indices) const;
    /// Keep the given feature columns, in the given order.
    Dataset select_features(std::span<const std::size_t> columns) const;

    /// Cell-for-cell equality; NaN cells compare equal to NaN cells.
    bool same_as(const Dataset& other) const;

private:
    std::vector<FeatureSpec> features_;
    std::vector<double> cells_;
    std::vector<int> labels_;
    std::vector<std::string> class_names_;
};

// ---------------------------------------------------------------------------
// Schema sidecar + CSV loading

enum class ColumnKind { numeric, categorical, class_label };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
};

/// Schema sidecar: one `name: kind` line per CSV column, kind in
/// {numeric, categorical, class}. Blank lines and `#` comments are ignored.
std::vector<ColumnSchema> parse_schema(std::istream& in);
std::vector<ColumnSchema> load_schema(const std::filesystem::path& path);

/// Comma separated, header required, RFC-4180 quoting. `?` and empty cells
/// are missing. Exactly one class column. Requires >= 2 distinct classes.
Dataset parse_csv(std::istream& in, const std::vector<ColumnSchema>& schema);
Dataset load_csv(const std::filesystem::path& path, const std::vector<ColumnSchema>& schema);

/// Split one CSV record (no trailing newline) into fields.
std::vector<std::string> split_csv_record(const std::string& line);

// ---------------------------------------------------------------------------
// Fold plans

struct FoldPlan {
    std::size_t repetition = 1;  // 1-based
    std::size_t fold = 1;        // 1-based
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
};

/// repetitions x k plans. Within a repetition each class's rows are shuffled
/// (seed ^ repetition) and dealt round-robin into folds, continuing the deal
/// position across classes, so per-class and total fold sizes differ by at
/// most one.
std::vector<FoldPlan> stratified_folds(const Dataset& d, std::size_t k, std::size_t repetitions,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Missing numeric values

/// Replaces NaN numeric cells with the training-split column mean.
class NumericImputer {
public:
    static NumericImputer fit(const Dataset& train);
    Dataset apply(const Dataset& d) const;
    const std::vector<double>& means() const { return means_; }

private:
    std::vector<double> means_;
};

// ---------------------------------------------------------------------------
// One-hot + z-score encoding for linear models

struct EncodedDataset {
    std::size_t rows = 0;
    std::size_t width = 0;
    std::vector<double> matrix;             // row-major rows x width
    std::vector<std::size_t> column_origin; // encoded column -> original feature
    std::vector<std::string> column_names;  // "feature" or "feature=category"
    std::vector<int> labels_int;            // 0..C-1 in class_names order
    std::size_t class_count = 0;

    double at(std::size_t r, std::size_t c) const { return matrix[r * width + c]; }
};

class Encoder {
public:
    /// Categoricals one-hot over the categories seen in `train`; numerics
    /// standardised with the training mean and population deviation.
    static Encoder fit(const Dataset& train);
    EncodedDataset transform(const Dataset& d) const;

    std::size_t width() const { return column_origin_.size(); }
    const std::vector<std::size_t>& column_origin() const { return column_origin_; }
    const std::vector<std::string>& column_names() const { return column_names_; }

private:
    struct Column {
        std::size_t feature;
        int category;  // -1 for numeric columns
        double mean;
        double scale;  // 0 for zero-variance numeric columns
    };
    std::vector<Column> columns_;
    std::vector<std::size_t> column_origin_;
    std::vector<std::string> column_names_;
    std::size_t feature_count_ = 0;
};

// ---------------------------------------------------------------------------
// Equal-frequency discretisation for rule learners

class Discretizer {
public:
    /// Cut points per numeric feature; a value v lands in bin
    /// #{edges e : v > e}, so out-of-range values clamp to the end bins.
    static Discretizer fit(const Dataset& train, std::size_t bins = 4);
    Dataset transform(const Dataset& d) const;

    /// Empty for categorical features.
    const std::vector<double>& edges(std::size_t feature) const { return edges_[feature]; }

private:
    std::vector<std::vector<double>> edges_;
    std::vector<FeatureSpec> output_features_;
};

}  // namespace intstab::data
