#include "intstab/dataset.hpp"

#include "intstab/random.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace intstab::data {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

bool parse_number(const std::string& s, double& out) {
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0' && errno != ERANGE && std::isfinite(out);
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Reads one logical CSV record, which may span lines inside quotes.
bool read_record(std::istream& in, std::string& record) {
    record.clear();
    std::string line;
    bool in_quotes = false;
    bool any = false;
    while (std::getline(in, line)) {
        any = true;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!record.empty() || in_quotes) record += '\n';
        record += line;
        for (char c : line) {
            if (c == '"') in_quotes = !in_quotes;
        }
        if (!in_quotes) return true;
    }
    if (in_quotes) throw DataError("unterminated quoted field at end of file");
    return any;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<FeatureSpec> features, std::vector<double> cells,
                 std::vector<int> labels, std::vector<std::string> class_names)
    : features_(std::move(features)),
      cells_(std::move(cells)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
    if (cells_.size() != labels_.size() * features_.size()) {
        throw DataError("dataset: cell count does not match rows x features");
    }
    std::set<std::string> names;
    for (const auto& f : features_) {
        if (!names.insert(f.name).second) throw DataError("dataset: duplicate feature name '" + f.name + "'");
        if (f.is_categorical()) {
            if (f.categories.empty()) throw DataError("dataset: categorical feature '" + f.name + "' has no categories");
            std::set<std::string> cats(f.categories.begin(), f.categories.end());
            if (cats.size() != f.categories.size()) {
                throw DataError("dataset: duplicate category in feature '" + f.name + "'");
            }
        }
    }
    const int c = static_cast<int>(class_names_.size());
    for (int y : labels_) {
        if (y < 0 || y >= c) throw DataError("dataset: label index out of range");
    }
    const std::size_t d = features_.size();
    for (std::size_t j = 0; j < d; ++j) {
        if (!features_[j].is_categorical()) continue;
        const double limit = static_cast<double>(features_[j].categories.size());
        for (std::size_t r = 0; r < labels_.size(); ++r) {
            double v = cells_[r * d + j];
            if (!(v >= 0 && v < limit) || v != std::floor(v)) {
                throw DataError("dataset: invalid category index in feature '" + features_[j].name + "'");
            }
        }
    }
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_names_.size(), 0);
    for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

bool Dataset::all_categorical() const {
    return std::all_of(features_.begin(), features_.end(),
                       [](const FeatureSpec& f) { return f.is_categorical(); });
}

Dataset Dataset::subset(std::span<const std::size_t> row_indices) const {
    const std::size_t d = cols();
    std::vector<double> cells;
    cells.reserve(row_indices.size() * d);
    std::vector<int> labels;
    labels.reserve(row_indices.size());
    for (std::size_t r : row_indices) {
        if (r >= rows()) throw DataError("subset: row index out of range");
        auto src = row(r);
        cells.insert(cells.end(), src.begin(), src.end());
        labels.push_back(labels_[r]);
    }
    return Dataset(features_, std::move(cells), std::move(labels), class_names_);
}

Dataset Dataset::select_features(std::span<const std::size_t> columns) const {
    std::vector<FeatureSpec> features;
    features.reserve(columns.size());
    for (std::size_t c : columns) {
        if (c >= cols()) throw DataError("select_features: column index out of range");
        features.push_back(features_[c]);
    }
    std::vector<double> cells;
    cells.reserve(rows() * columns.size());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c : columns) cells.push_back(at(r, c));
    }
    return Dataset(std::move(features), std::move(cells), labels_, class_names_);
}

bool Dataset::same_as(const Dataset& other) const {
    if (features_ != other.features_ || labels_ != other.labels_ ||
        class_names_ != other.class_names_ || cells_.size() != other.cells_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        double a = cells_[i];
        double b = other.cells_[i];
        if (std::isnan(a) && std::isnan(b)) continue;
        if (a != b) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Schema + CSV

std::vector<ColumnSchema> parse_schema(std::istream& in) {
    std::vector<ColumnSchema> schema;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        auto colon = body.rfind(':');
        if (colon == std::string::npos) {
            throw DataError("schema line " + std::to_string(lineno) + ": expected 'name: kind'");
        }
        ColumnSchema col;
        col.name = trim(std::string_view(body).substr(0, colon));
        std::string kind = trim(std::string_view(body).substr(colon + 1));
        if (kind == "numeric") {
            col.kind = ColumnKind::numeric;
        } else if (kind == "categorical") {
            col.kind = ColumnKind::categorical;
        } else if (kind == "class") {
            col.kind = ColumnKind::class_label;
        } else {
            throw DataError("schema line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
        }
        if (col.name.empty()) throw DataError("schema line " + std::to_string(lineno) + ": empty column name");
        schema.push_back(std::move(col));
    }
    return schema;
}

std::vector<ColumnSchema> load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file: " + path.string());
    return parse_schema(in);
}

std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur += c;
        }
    }
    fields.push_back(was_quoted ? cur : trim(cur));
    return fields;
}

Dataset parse_csv(std::istream& in, const std::vector<ColumnSchema>& schema) {
    std::string record;
    if (!read_record(in, record)) throw DataError("csv: empty file (header required)");
    auto header = split_csv_record(record);

    std::map<std::string, std::size_t> schema_index;
    for (std::size_t i = 0; i < schema.size(); ++i) schema_index[schema[i].name] = i;

    // Resolve every header column against the schema.
    std::vector<ColumnKind> kinds;
    std::size_t class_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto it = schema_index.find(header[c]);
        if (it == schema_index.end()) throw DataError("csv: column '" + header[c] + "' not covered by schema");
        kinds.push_back(schema[it->second].kind);
        if (kinds.back() == ColumnKind::class_label) {
            if (class_col != header.size()) throw DataError("csv: more than one class column");
            class_col = c;
        }
    }
    if (class_col == header.size()) throw DataError("csv: no class column declared");

    std::vector<std::vector<std::string>> raw;
    std::size_t lineno = 1;
    while (read_record(in, record)) {
        ++lineno;
        if (trim(record).empty()) continue;
        auto fields = split_csv_record(record);
        if (fields.size() != header.size()) {
            throw DataError("csv line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        if (is_missing(fields[class_col])) {
            throw DataError("csv line " + std::to_string(lineno) + ": missing class label");
        }
        raw.push_back(std::move(fields));
    }
    if (raw.empty()) throw DataError("csv: no data rows");

    // Category and class dictionaries in lexicographic order.
    std::vector<FeatureSpec> features;
    std::vector<std::size_t> feature_cols;
    std::vector<std::map<std::string, int>> dictionaries;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == class_col) continue;
        FeatureSpec f;
        f.name = header[c];
        f.kind = kinds[c] == ColumnKind::categorical ? FeatureKind::categorical : FeatureKind::numeric;
        std::map<std::string, int> dict;
        if (f.is_categorical()) {
            std::set<std::string> values;
            for (const auto& row : raw) values.insert(is_missing(row[c]) ? std::string(kMissingCategory) : row[c]);
            f.categories.assign(values.begin(), values.end());
            for (std::size_t i = 0; i < f.categories.size(); ++i) dict[f.categories[i]] = static_cast<int>(i);
        }
        features.push_back(std::move(f));
        feature_cols.push_back(c);
        dictionaries.push_back(std::move(dict));
    }
    std::set<std::string> class_set;
    for (const auto& row : raw) class_set.insert(row[class_col]);
    std::vector<std::string> class_names(class_set.begin(), class_set.end());
    if (class_names.size() < 2) throw DataError("csv: single-class dataset ('" + class_names.front() + "')");
    std::map<std::string, int> class_index;
    for (std::size_t i = 0; i < class_names.size(); ++i) class_index[class_names[i]] = static_cast<int>(i);

    const std::size_t d = features.size();
    std::vector<double> cells(raw.size() * d);
    std::vector<int> labels(raw.size());
    for (std::size_t r = 0; r < raw.size(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            const std::string& cell = raw[r][feature_cols[j]];
            double v;
            if (features[j].is_categorical()) {
                v = dictionaries[j].at(is_missing(cell) ? std::string(kMissingCategory) : cell);
            } else if (is_missing(cell)) {
                v = kNaN;
            } else if (!parse_number(cell, v)) {
                throw DataError("csv row " + std::to_string(r + 1) + ": unparsable numeric cell '" + cell +
                                "' in column '" + features[j].name + "'");
            }
            cells[r * d + j] = v;
        }
        labels[r] = class_index.at(raw[r][class_col]);
    }
    return Dataset(std::move(features), std::move(cells), std::move(labels), std::move(class_names));
}

Dataset load_csv(const std::filesystem::path& path, const std::vector<ColumnSchema>& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open csv file: " + path.string());
    return parse_csv(in, schema);
}

// ---------------------------------------------------------------------------
// Folds

std::vector<FoldPlan> stratified_folds(const Dataset& d, std::size_t k, std::size_t repetitions,
                                       std::uint64_t seed) {
    if (k < 2) throw DataError("stratified_folds: k must be >= 2");
    if (k > d.rows()) throw DataError("stratified_folds: k exceeds row count");

    std::vector<std::vector<std::size_t>> members(d.class_count());
    for (std::size_t r = 0; r < d.rows(); ++r) members[static_cast<std::size_t>(d.label(r))].push_back(r);

    std::vector<FoldPlan> plans;
    plans.reserve(repetitions * k);
    for (std::size_t rep = 1; rep <= repetitions; ++rep) {
        Rng rng(seed ^ static_cast<std::uint64_t>(rep));
        std::vector<std::size_t> fold_of(d.rows());
        std::size_t position = 0;
        for (auto group : members) {
            rng.shuffle(group);
            for (std::size_t r : group) fold_of[r] = position++ % k;
        }
        for (std::size_t f = 0; f < k; ++f) {
            FoldPlan plan;
            plan.repetition = rep;
            plan.fold = f + 1;
            for (std::size_t r = 0; r < d.rows(); ++r) {
                (fold_of[r] == f ? plan.test_indices : plan.train_indices).push_back(r);
            }
            plans.push_back(std::move(plan));
        }
    }
    return plans;
}

// ---------------------------------------------------------------------------
// Imputer

NumericImputer NumericImputer::fit(const Dataset& train) {
    NumericImputer imp;
    imp.means_.assign(train.cols(), 0.0);
    for (std::size_t j = 0; j < train.cols(); ++j) {
        if (train.feature(j).is_categorical()) continue;
        double sum = 0;
        std::size_t count = 0;
        for (std::size_t r = 0; r < train.rows(); ++r) {
            double v = train.at(r, j);
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        }
        imp.means_[j] = count ? sum / static_cast<double>(count) : 0.0;
    }
    return imp;
}

Dataset NumericImputer::apply(const Dataset& d) const {
    if (d.cols() != means_.size()) throw DataError("imputer: feature count mismatch");
    std::vector<double> cells = d.cells();
    bool changed = false;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            double& v = cells[r * d.cols() + j];
            if (std::isnan(v)) {
                v = means_[j];
                changed = true;
            }
        }
    }
    if (!changed) return d;
    return Dataset(d.features(), std::move(cells), d.labels(), d.class_names());
}

// ---------------------------------------------------------------------------
// Encoder

Encoder Encoder::fit(const Dataset& train) {
    if (train.rows() == 0) throw DataError("encoder: empty training set");
    Encoder enc;
    enc.feature_count_ = train.cols();
    for (std::size_t j = 0; j < train.cols(); ++j) {
        const FeatureSpec& f = train.feature(j);
        if (f.is_categorical()) {
            std::vector<bool> seen(f.categories.size(), false);
            for (std::size_t r = 0; r < train.rows(); ++r) seen[static_cast<std::size_t>(train.at(r, j))] = true;
            for (std::size_t c = 0; c < seen.size(); ++c) {
                if (!seen[c]) continue;
                enc.columns_.push_back({j, static_cast<int>(c), 0.0, 1.0});
                enc.column_origin_.push_back(j);
                enc.column_names_.push_back(f.name + "=" + f.categories[c]);
            }
        } else {
            double sum = 0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < train.rows(); ++r) {
                double v = train.at(r, j);
                if (!std::isnan(v)) {
                    sum += v;
                    ++count;
                }
            }
            double mean = count ? sum / static_cast<double>(count) : 0.0;
            double ss = 0;
            for (std::size_t r = 0; r < train.rows(); ++r) {
                double v = train.at(r, j);
                if (!std::isnan(v)) ss += (v - mean) * (v - mean);
            }
            double var = count ? ss / static_cast<double>(count) : 0.0;
            double sd = std::sqrt(var);
            enc.columns_.push_back({j, -1, mean, sd > 0 ? 1.0 / sd : 0.0});
            enc.column_origin_.push_back(j);
            enc.column_names_.push_back(f.name);
        }
    }
    return enc;
}

EncodedDataset Encoder::transform(const Dataset& d) const {
    if (d.cols() != feature_count_) throw DataError("encoder: feature count mismatch");
    EncodedDataset out;
    out.rows = d.rows();
    out.width = columns_.size();
    out.column_origin = column_origin_;
    out.column_names = column_names_;
    out.labels_int = d.labels();
    out.class_count = d.class_count();
    out.matrix.assign(out.rows * out.width, 0.0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            const Column& col = columns_[c];
            double v = d.at(r, col.feature);
            double e;
            if (col.category >= 0) {
                e = static_cast<int>(v) == col.category ? 1.0 : 0.0;
            } else if (std::isnan(v)) {
                e = 0.0;  // training mean
            } else {
                e = (v - col.mean) * col.scale;
            }
            out.matrix[r * out.width + c] = e;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Discretizer

Discretizer Discretizer::fit(const Dataset& train, std::size_t bins) {
    if (bins < 2) throw DataError("discretize: bins must be >= 2");
    Discretizer disc;
    disc.edges_.resize(train.cols());
    for (std::size_t j = 0; j < train.cols(); ++j) {
        const FeatureSpec& f = train.feature(j);
        if (f.is_categorical()) {
            disc.output_features_.push_back(f);
            continue;
        }
        std::vector<double> values;
        values.reserve(train.rows());
        for (std::size_t r = 0; r < train.rows(); ++r) {
            double v = train.at(r, j);
            if (!std::isnan(v)) values.push_back(v);
        }
        std::sort(values.begin(), values.end());
        std::vector<double>& edges = disc.edges_[j];
        const std::size_t n = values.size();
        for (std::size_t q = 1; q < bins && n > 0; ++q) {
            std::size_t pos = q * n / bins;  // rows strictly below the cut
            if (pos == 0) continue;
            double edge = values[pos - 1];
            if (edge >= values.back()) continue;  // would leave the top bin empty
            if (edges.empty() || edge > edges.back()) edges.push_back(edge);
        }
        FeatureSpec out{f.name, FeatureKind::categorical, {}};
        if (edges.empty()) {
            out.categories.push_back("all");
        } else {
            out.categories.push_back("<=" + format_number(edges.front()));
            for (std::size_t i = 1; i < edges.size(); ++i) {
                out.categories.push_back("(" + format_number(edges[i - 1]) + "," + format_number(edges[i]) + "]");
            }
            out.categories.push_back(">" + format_number(edges.back()));
        }
        // Rounded labels can collide for very close edges; keep them unique.
        std::set<std::string> seen;
        for (auto& name : out.categories) {
            while (!seen.insert(name).second) name += "'";
        }
        disc.output_features_.push_back(std::move(out));
    }
    return disc;
}

Dataset Discretizer::transform(const Dataset& d) const {
    if (d.cols() != edges_.size()) throw DataError("discretize: feature count mismatch");
    std::vector<double> cells = d.cells();
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            if (d.feature(j).is_categorical()) continue;
            double v = d.at(r, j);
            const auto& edges = edges_[j];
            // NaN falls in the first bin; the harness imputes beforehand.
            std::size_t bin = std::isnan(v) ? 0 : static_cast<std::size_t>(
                std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
            cells[r * d.cols() + j] = static_cast<double>(bin);
        }
    }
    return Dataset(output_features_, std::move(cells), d.labels(), d.class_names());
}

}  // namespace intstab::data
