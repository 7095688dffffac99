#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace causalkit {

// Column-major table of named, finite real columns.  Immutable after
// construction; all transformations return new datasets.
class Dataset {
public:
    Dataset(std::vector<std::string> columns, std::vector<std::vector<double>> values);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return names_.size(); }
    const std::vector<std::string>& columns() const { return names_; }

    bool has_column(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // MissingPredictorError
    const std::vector<double>& col(const std::string& name) const;
    const std::vector<double>& col(std::size_t idx) const { return values_[idx]; }

    // New dataset with only the given columns, in the given order.
    Dataset select(const std::vector<std::string>& names) const;

    // New dataset with the given rows, in the given order.
    Dataset take_rows(const std::vector<std::size_t>& rows) const;

    // Row-major buffer (n_rows x names.size()) with columns gathered in the
    // requested order; the workhorse for model fitting and prediction.
    std::vector<double> rows_in_order(const std::vector<std::string>& names) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> values_;
    std::size_t n_rows_;
};

// Per-column affine transform captured by standardize so it can be undone.
struct Standardizer {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> std_dev;  // strictly positive

    Dataset apply(const Dataset& ds) const;
    Dataset invert(const Dataset& ds) const;
};

// Rescales every column to mean 0, sample std 1 (N-1 denominator).
std::pair<Dataset, Standardizer> standardize(const Dataset& ds);

// Seeded random row partition into floor(fraction*N) train rows and the
// remainder.  Both parts must end up nonempty.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct PearsonResult {
    double r;  // in [-1, 1]
    double p;  // two-sided, Student-t with N-2 df
};

PearsonResult pearson(const Dataset& ds, const std::string& x, const std::string& y);

// Plain correlation of two equal-length vectors (no p-value).
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// CSV: header row of column names, one decimal row per observation,
// \n line endings, shortest round-trip number rendering.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_csv(const std::filesystem::path& path);

}  // namespace causalkit
