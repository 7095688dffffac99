#include "causalkit/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "causalkit/errors.hpp"

namespace causalkit {

double ImportanceReport::raw_of(const std::string& predictor) const {
    for (std::size_t i = 0; i < predictors.size(); ++i)
        if (predictors[i] == predictor) return raw[i];
    throw MissingPredictorError("report has no predictor: " + predictor);
}

double ImportanceReport::normalized_of(const std::string& predictor) const {
    for (std::size_t i = 0; i < predictors.size(); ++i)
        if (predictors[i] == predictor) return normalized[i];
    throw MissingPredictorError("report has no predictor: " + predictor);
}

ImportanceReport make_report(std::string method, std::vector<std::string> predictors,
                             std::vector<double> raw) {
    if (predictors.size() != raw.size())
        throw LengthMismatchError("make_report: predictor/score count mismatch");
    if (predictors.empty()) throw EmptyFeatureError("make_report: no predictors");
    ImportanceReport report;
    report.method = std::move(method);
    report.predictors = std::move(predictors);
    report.raw = std::move(raw);
    const auto [lo, hi] = std::minmax_element(report.raw.begin(), report.raw.end());
    report.normalized.resize(report.raw.size(), 0.0);
    if (*hi > *lo) {
        const double span = *hi - *lo;
        for (std::size_t i = 0; i < report.raw.size(); ++i)
            report.normalized[i] = (report.raw[i] - *lo) / span;
    }
    return report;
}

namespace {

constexpr std::size_t kMaxShapleyFeatures = 20;
constexpr std::size_t kCompositeChunkRows = 16384;

// Shapley weights w[s] = s!(K-s-1)!/K! = 1/(K*C(K-1,s)); binomials up to
// K=20 are exact in double.
std::vector<double> shapley_weights(std::size_t k) {
    std::vector<double> binom(k);  // C(K-1, s)
    binom[0] = 1.0;
    for (std::size_t s = 1; s < k; ++s)
        binom[s] = binom[s - 1] * static_cast<double>(k - s) / static_cast<double>(s);
    std::vector<double> w(k);
    for (std::size_t s = 0; s < k; ++s) w[s] = 1.0 / (static_cast<double>(k) * binom[s]);
    return w;
}

// phi_j = sum over coalitions S not containing j of w[|S|] (v[S+j] - v[S]).
std::vector<double> shapley_from_values(const std::vector<double>& v, std::size_t k) {
    const auto weights = shapley_weights(k);
    std::vector<double> phi(k, 0.0);
    const std::size_t n_masks = std::size_t{1} << k;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        const double w = weights[static_cast<std::size_t>(std::popcount(mask))];
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t bit = std::size_t{1} << j;
            if (mask & bit) continue;
            phi[j] += w * (v[mask | bit] - v[mask]);
        }
    }
    return phi;
}

// Generic value function: v(S) = mean over background rows of the model
// output on composites taking the point's values on S.  Masks are evaluated
// in chunked batches so one predict_rows call covers many coalitions.
void coalition_values_generic(const Model& model, const double* point, const double* background,
                              std::size_t n_bg, std::size_t k, std::vector<double>& v) {
    const std::size_t n_masks = std::size_t{1} << k;
    v.assign(n_masks, 0.0);
    const std::size_t masks_per_chunk = std::max<std::size_t>(1, kCompositeChunkRows / n_bg);
    std::vector<double> rows;
    std::vector<double> preds;
    for (std::size_t first = 0; first < n_masks; first += masks_per_chunk) {
        const std::size_t last = std::min(n_masks, first + masks_per_chunk);
        const std::size_t n_rows = (last - first) * n_bg;
        rows.resize(n_rows * k);
        double* out = rows.data();
        for (std::size_t mask = first; mask < last; ++mask) {
            for (std::size_t b = 0; b < n_bg; ++b) {
                const double* src = background + b * k;
                for (std::size_t j = 0; j < k; ++j)
                    out[j] = (mask >> j) & 1 ? point[j] : src[j];
                out += k;
            }
        }
        preds.resize(n_rows);
        model.predict_rows(rows.data(), n_rows, preds.data());
        for (std::size_t mask = first; mask < last; ++mask) {
            double acc = 0.0;
            const double* block = preds.data() + (mask - first) * n_bg;
            for (std::size_t b = 0; b < n_bg; ++b) acc += block[b];
            v[mask] = acc / static_cast<double>(n_bg);
        }
    }
}

// Forest shortcut computing the identical value function without building
// composites: walk each tree once per background row, splitting the
// traversal only at nodes where the point and the background row disagree;
// each leaf then contributes its weight to every coalition consistent with
// the forced feature choices (exactly 2^k additions per walk).
void descend_tree(const std::vector<TreeNode>& nodes, int idx, const double* point,
                  const double* bg_row, std::size_t full_mask, std::size_t forced,
                  std::size_t chosen, std::vector<double>& v) {
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    if (node.is_leaf()) {
        const std::size_t free = full_mask & ~forced;
        std::size_t sub = free;
        for (;;) {
            v[chosen | sub] += node.value;
            if (sub == 0) break;
            sub = (sub - 1) & free;
        }
        return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const bool point_left = point[f] <= node.threshold;
    const bool bg_left = bg_row[f] <= node.threshold;
    if (point_left == bg_left) {
        descend_tree(nodes, point_left ? node.left : node.right, point, bg_row, full_mask,
                     forced, chosen, v);
        return;
    }
    const std::size_t bit = std::size_t{1} << f;
    if (forced & bit) {
        const bool use_point = (chosen & bit) != 0;
        const bool go_left = use_point ? point_left : bg_left;
        descend_tree(nodes, go_left ? node.left : node.right, point, bg_row, full_mask, forced,
                     chosen, v);
        return;
    }
    descend_tree(nodes, point_left ? node.left : node.right, point, bg_row, full_mask,
                 forced | bit, chosen | bit, v);
    descend_tree(nodes, bg_left ? node.left : node.right, point, bg_row, full_mask,
                 forced | bit, chosen, v);
}

void coalition_values_forest(const RandomForest& forest, const double* point,
                             const double* background, std::size_t n_bg, std::size_t k,
                             std::vector<double>& v) {
    const std::size_t n_masks = std::size_t{1} << k;
    v.assign(n_masks, 0.0);
    const std::size_t full_mask = n_masks - 1;
    for (const auto& tree : forest.trees())
        for (std::size_t b = 0; b < n_bg; ++b)
            descend_tree(tree.nodes(), 0, point, background + b * k, full_mask, 0, 0, v);
    const double scale =
        1.0 / (static_cast<double>(n_bg) * static_cast<double>(forest.trees().size()));
    for (double& x : v) x *= scale;
}

void coalition_values(const Model& model, const double* point, const double* background,
                      std::size_t n_bg, std::size_t k, std::vector<double>& v) {
    if (const auto* forest = dynamic_cast<const RandomForest*>(&model)) {
        coalition_values_forest(*forest, point, background, n_bg, k, v);
        return;
    }
    coalition_values_generic(model, point, background, n_bg, k, v);
}

}  // namespace

std::vector<double> shapley_exact(const Model& model, const std::vector<double>& point,
                                  const double* background, std::size_t n_bg) {
    const std::size_t k = model.predictor_names().size();
    if (point.size() != k) throw LengthMismatchError("shapley_exact: point has wrong size");
    if (k > kMaxShapleyFeatures)
        throw TooManyFeaturesError("shapley_exact: exact enumeration capped at 20 features");
    if (n_bg == 0) throw EmptyBackgroundError("shapley_exact: background is empty");
    std::vector<double> v;
    coalition_values(model, point.data(), background, n_bg, k, v);
    return shapley_from_values(v, k);
}

std::vector<double> shapley_exact(const Model& model, const std::vector<double>& point,
                                  const Dataset& background) {
    const auto bg = background.rows_in_order(model.predictor_names());
    return shapley_exact(model, point, bg.data(), background.n_rows());
}

std::pair<ShapleyMatrix, ImportanceReport> shapley_report(
    const Model& model, const Dataset& test, const Dataset& background,
    const std::vector<std::string>& predictors, const std::string& method_label) {
    const auto& model_order = model.predictor_names();
    const std::size_t k = model_order.size();
    if (k > kMaxShapleyFeatures)
        throw TooManyFeaturesError("shapley_report: exact enumeration capped at 20 features");
    {
        auto a = predictors;
        auto b = model_order;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b)
            throw MissingPredictorError(
                "shapley_report: predictor list must match the model's predictors");
    }
    const auto bg = background.rows_in_order(model_order);
    const auto rows = test.rows_in_order(model_order);
    const std::size_t n = test.n_rows();

    ShapleyMatrix matrix;
    matrix.predictors = predictors;
    matrix.n_rows = n;
    matrix.phi.resize(n * k);
    // Column map from model order to report order.
    std::vector<std::size_t> col(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto it = std::find(model_order.begin(), model_order.end(), predictors[j]);
        col[static_cast<std::size_t>(it - model_order.begin())] = j;
    }

    std::vector<double> v;
    std::vector<double> point(k);
    std::vector<double> abs_sum(k, 0.0), signed_sum(k, 0.0);
    double baseline = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        std::copy(rows.begin() + static_cast<std::ptrdiff_t>(r * k),
                  rows.begin() + static_cast<std::ptrdiff_t>((r + 1) * k), point.begin());
        coalition_values(model, point.data(), bg.data(), background.n_rows(), k, v);
        if (r == 0) baseline = v[0];
        const auto phi = shapley_from_values(v, k);
        for (std::size_t j = 0; j < k; ++j) {
            matrix.phi[r * k + col[j]] = phi[j];
            abs_sum[col[j]] += std::abs(phi[j]);
            signed_sum[col[j]] += phi[j];
        }
    }
    matrix.baseline = baseline;
    matrix.signed_mean.resize(k);
    std::vector<double> raw(k);
    for (std::size_t j = 0; j < k; ++j) {
        matrix.signed_mean[j] = signed_sum[j] / static_cast<double>(n);
        raw[j] = abs_sum[j] / static_cast<double>(n);
    }
    return {std::move(matrix), make_report(method_label, predictors, std::move(raw))};
}

ImportanceReport coef_report(const LinearModel& model) {
    std::vector<double> raw;
    raw.reserve(model.coefficients().size());
    for (const double c : model.coefficients()) raw.push_back(std::abs(c));
    return make_report("LR-coefs", model.predictor_names(), std::move(raw));
}

ImportanceReport impurity_importances(const RandomForest& forest,
                                      const std::vector<std::string>& predictors) {
    const auto& model_order = forest.predictor_names();
    {
        auto a = predictors;
        auto b = model_order;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b)
            throw MissingPredictorError(
                "impurity_importances: predictor list must match the forest's predictors");
    }
    std::vector<double> total(model_order.size(), 0.0);
    for (const auto& tree : forest.trees()) {
        const auto& nodes = tree.nodes();
        const auto root_count = static_cast<double>(nodes.front().count);
        for (const auto& node : nodes) {
            if (node.is_leaf()) continue;
            const auto& left = nodes[static_cast<std::size_t>(node.left)];
            const auto& right = nodes[static_cast<std::size_t>(node.right)];
            const auto n = static_cast<double>(node.count);
            const double reduction =
                node.impurity - (static_cast<double>(left.count) / n) * left.impurity -
                (static_cast<double>(right.count) / n) * right.impurity;
            total[static_cast<std::size_t>(node.feature)] += (n / root_count) * reduction;
        }
    }
    double sum = 0.0;
    for (double& t : total) {
        t /= static_cast<double>(forest.trees().size());
        sum += t;
    }
    if (sum > 0.0)
        for (double& t : total) t /= sum;

    // Reorder from model order to the requested report order.
    std::vector<double> raw(predictors.size());
    for (std::size_t j = 0; j < predictors.size(); ++j) {
        const auto it = std::find(model_order.begin(), model_order.end(), predictors[j]);
        raw[j] = total[static_cast<std::size_t>(it - model_order.begin())];
    }
    return make_report("RF-imps", predictors, std::move(raw));
}

}  // namespace causalkit
