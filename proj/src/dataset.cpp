#include "causalkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/special.hpp"

namespace causalkit {

Dataset::Dataset(std::vector<std::string> columns, std::vector<std::vector<double>> values)
    : names_(std::move(columns)), values_(std::move(values)) {
    if (names_.empty()) throw ValidationError("Dataset: at least one column required");
    if (names_.size() != values_.size())
        throw LengthMismatchError("Dataset: column name/value count mismatch");
    std::set<std::string> unique(names_.begin(), names_.end());
    if (unique.size() != names_.size()) throw DuplicateError("Dataset: duplicate column names");
    n_rows_ = values_.front().size();
    if (n_rows_ == 0) throw ValidationError("Dataset: at least one row required");
    for (std::size_t c = 0; c < values_.size(); ++c) {
        if (values_[c].size() != n_rows_)
            throw LengthMismatchError("Dataset: ragged column " + names_[c]);
        for (const double v : values_[c])
            if (!std::isfinite(v))
                throw ValidationError("Dataset: non-finite value in column " + names_[c]);
    }
}

bool Dataset::has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Dataset::index_of(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw MissingPredictorError("no such column: " + name);
    return static_cast<std::size_t>(it - names_.begin());
}

const std::vector<double>& Dataset::col(const std::string& name) const {
    return values_[index_of(name)];
}

Dataset Dataset::select(const std::vector<std::string>& names) const {
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& name : names) cols.push_back(col(name));
    return Dataset(names, std::move(cols));
}

Dataset Dataset::take_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::vector<double>> cols(names_.size());
    for (std::size_t c = 0; c < names_.size(); ++c) {
        cols[c].reserve(rows.size());
        for (const std::size_t r : rows) cols[c].push_back(values_[c][r]);
    }
    return Dataset(names_, std::move(cols));
}

std::vector<double> Dataset::rows_in_order(const std::vector<std::string>& names) const {
    std::vector<const std::vector<double>*> src;
    src.reserve(names.size());
    for (const auto& name : names) src.push_back(&col(name));
    std::vector<double> out(n_rows_ * names.size());
    for (std::size_t r = 0; r < n_rows_; ++r)
        for (std::size_t c = 0; c < src.size(); ++c)
            out[r * src.size() + c] = (*src[c])[r];
    return out;
}

namespace {

double column_mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

// Sample standard deviation, N-1 denominator.
double column_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Dataset Standardizer::apply(const Dataset& ds) const {
    std::vector<std::vector<double>> cols;
    cols.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::vector<double> v = ds.col(columns[c]);
        for (double& x : v) x = (x - mean[c]) / std_dev[c];
        cols.push_back(std::move(v));
    }
    return Dataset(columns, std::move(cols));
}

Dataset Standardizer::invert(const Dataset& ds) const {
    std::vector<std::vector<double>> cols;
    cols.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::vector<double> v = ds.col(columns[c]);
        for (double& x : v) x = x * std_dev[c] + mean[c];
        cols.push_back(std::move(v));
    }
    return Dataset(columns, std::move(cols));
}

std::pair<Dataset, Standardizer> standardize(const Dataset& ds) {
    Standardizer st;
    st.columns = ds.columns();
    std::vector<std::vector<double>> cols;
    cols.reserve(ds.n_cols());
    for (std::size_t c = 0; c < ds.n_cols(); ++c) {
        const auto& v = ds.col(c);
        const double mu = column_mean(v);
        const double sigma = column_std(v, mu);
        if (sigma <= 0.0)
            throw ConstantColumnError("standardize: column " + ds.columns()[c] +
                                      " has zero variance");
        st.mean.push_back(mu);
        st.std_dev.push_back(sigma);
        std::vector<double> out(v.size());
        for (std::size_t r = 0; r < v.size(); ++r) out[r] = (v[r] - mu) / sigma;
        cols.push_back(std::move(out));
    }
    return {Dataset(ds.columns(), std::move(cols)), std::move(st)};
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw ValidationError("split: train_fraction must lie in (0, 1)");
    const std::size_t n = ds.n_rows();
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw EmptySplitError("split: both parts must receive at least one row");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const std::vector<std::size_t> train_rows(order.begin(),
                                              order.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                                             order.end());
    return {ds.take_rows(train_rows), ds.take_rows(test_rows)};
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatchError("pearson_r: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw InsufficientSamplesError("pearson_r: need at least 2 samples");
    const double mx = column_mean(x);
    const double my = column_mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ConstantColumnError("pearson_r: constant column");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    return r;
}

PearsonResult pearson(const Dataset& ds, const std::string& x, const std::string& y) {
    const auto& vx = ds.col(x);
    const auto& vy = ds.col(y);
    if (ds.n_rows() < 3) throw InsufficientSamplesError("pearson: need at least 3 rows");
    const double r = pearson_r(vx, vy);
    const auto df = static_cast<double>(ds.n_rows() - 2);
    double p;
    if (std::abs(r) >= 1.0) {
        p = 0.0;
    } else {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        p = student_t_two_sided_p(t, df);
    }
    return {r, p};
}

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::string text;
    for (std::size_t c = 0; c < ds.n_cols(); ++c) {
        if (c) text += ',';
        text += ds.columns()[c];
    }
    text += '\n';
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t c = 0; c < ds.n_cols(); ++c) {
            if (c) text += ',';
            append_number(text, ds.col(c)[r]);
        }
        text += '\n';
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SyntaxError("empty CSV: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> names;
    {
        std::stringstream header(line);
        std::string field;
        while (std::getline(header, field, ',')) names.push_back(field);
    }
    if (names.empty()) throw SyntaxError("CSV header has no columns: " + path.string());
    std::vector<std::vector<double>> cols(names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        for (std::size_t c = 0; c < names.size(); ++c) {
            const std::size_t end = c + 1 < names.size() ? line.find(',', start) : line.size();
            if (end == std::string::npos)
                throw SyntaxError("CSV row " + std::to_string(line_no) + ": too few fields");
            double v = 0.0;
            const char* first = line.data() + start;
            const char* last = line.data() + end;
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last)
                throw SyntaxError("CSV row " + std::to_string(line_no) + ": bad number '" +
                                  line.substr(start, end - start) + "'");
            cols[c].push_back(v);
            start = end + 1;
        }
    }
    return Dataset(std::move(names), std::move(cols));
}

}  // namespace causalkit
