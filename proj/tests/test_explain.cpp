#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "causalkit/dataset.hpp"
#include "causalkit/errors.hpp"
#include "causalkit/explain.hpp"
#include "causalkit/forest.hpp"
#include "causalkit/linear_model.hpp"
#include "causalkit/mlp.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/scm.hpp"

using namespace causalkit;

namespace {

Dataset gaussian_bg(const std::vector<std::string>& cols, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> values(cols.size());
    for (auto& col : values) {
        col.resize(n);
        for (double& v : col) v = rng.next_gaussian();
    }
    return Dataset(cols, std::move(values));
}

double column_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("shapley of a linear model is coefficient times centered value") {
    const LinearModel lm(0.5, {"a", "b", "c"}, {2.0, -1.0, 0.25});
    const Dataset bg = gaussian_bg({"a", "b", "c"}, 64, 7);
    const std::vector<double> point{1.5, -0.75, 2.0};
    const std::vector<double> phi = shapley_exact(lm, point, bg);
    REQUIRE(phi.size() == 3);
    const std::vector<double> coefs{2.0, -1.0, 0.25};
    for (std::size_t j = 0; j < 3; ++j) {
        const double expected = coefs[j] * (point[j] - column_mean(bg.col(j)));
        CHECK(std::abs(phi[j] - expected) < 1e-6);
    }
}

TEST_CASE("shapley attributions satisfy efficiency for all model families") {
    const Scm scm = builtin_scm(BuiltinScm::Simple);
    const Dataset ds = sample(scm, 400, 3);
    const std::vector<std::string> predictors{"X", "D", "A", "K"};
    const Dataset train = ds.select({"X", "D", "A", "K", "Y"});

    FitConfig cfg;
    cfg.forest.n_trees = 10;
    cfg.mlp.hidden = 8;
    cfg.mlp.iterations = 20;

    const LinearModel lm = fit_ols(train, "Y", predictors);
    const RandomForest rf = fit_forest(train, "Y", predictors, cfg, 5);
    const Mlp nn = fit_mlp(train, "Y", predictors, cfg, 5);

    const Dataset bg = train.select(predictors).take_rows({0, 1, 2, 3, 4, 5, 6, 7});
    const std::vector<std::size_t> test_rows{11, 12, 13};

    for (const Model* model : std::initializer_list<const Model*>{&lm, &rf, &nn}) {
        for (const std::size_t r : test_rows) {
            std::vector<double> point(predictors.size());
            for (std::size_t j = 0; j < predictors.size(); ++j)
                point[j] = train.col(predictors[j])[r];
            const std::vector<double> phi = shapley_exact(*model, point, bg);

            // Baseline: mean model output over the background.
            std::vector<double> bg_pred = predict(*model, bg);
            const double baseline = column_mean(bg_pred);
            const Dataset one = Dataset(predictors, {{point[0]}, {point[1]}, {point[2]}, {point[3]}});
            const double fx = predict(*model, one)[0];
            const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
            CHECK(std::abs(baseline + total - fx) < 1e-9);
        }
    }
}

TEST_CASE("shapley is symmetric for interchangeable features") {
    // y depends on a and b identically (sum), data for a and b are swapped
    // copies, so every coalition treats them interchangeably.
    const LinearModel lm(0.0, {"a", "b", "c"}, {1.5, 1.5, -2.0});
    const Dataset bg({"a", "b", "c"},
                     {{0.3, -1.2, 0.9, 2.0}, {0.3, -1.2, 0.9, 2.0}, {1.0, 0.0, -1.0, 0.5}});
    const std::vector<double> point{0.8, 0.8, -0.3};
    const std::vector<double> phi = shapley_exact(lm, point, bg);
    CHECK(std::abs(phi[0] - phi[1]) < 1e-9);
}

namespace {

// Nonlinear model invariant under swapping its first two inputs.
struct SymmetricModel : Model {
    std::vector<std::string> names{"x1", "x2", "x3"};
    const std::vector<std::string>& predictor_names() const override { return names; }
    void predict_rows(const double* rows, std::size_t n, double* out) const override {
        for (std::size_t i = 0; i < n; ++i) {
            const double a = rows[i * 3], b = rows[i * 3 + 1], c = rows[i * 3 + 2];
            out[i] = a * b + std::sin(a + b) + c * c * c;
        }
    }
};

}  // namespace

TEST_CASE("shapley symmetry holds for a nonlinear model too") {
    const SymmetricModel model;
    // Background columns for x1 and x2 are identical per row and the point
    // has equal coordinates, so the two features enter every coalition
    // interchangeably.
    const Dataset bg({"x1", "x2", "x3"},
                     {{0.2, -1.1, 0.7, 1.9, -0.4},
                      {0.2, -1.1, 0.7, 1.9, -0.4},
                      {1.0, 0.3, -2.0, 0.0, 0.8}});
    const std::vector<double> phi = shapley_exact(model, {0.4, 0.4, -1.2}, bg);
    CHECK(std::abs(phi[0] - phi[1]) < 1e-9);
}

TEST_CASE("model ignoring all inputs gets all-zero attributions") {
    const LinearModel lm(7.0, {"a", "b"}, {0.0, 0.0});
    const Dataset bg = gaussian_bg({"a", "b"}, 16, 2);
    for (const double phi : shapley_exact(lm, {9.0, -3.0}, bg))
        CHECK(phi == 0.0);
}

TEST_CASE("shapley gives zero to a dummy feature") {
    const LinearModel lm(1.0, {"a", "dummy"}, {3.0, 0.0});
    const Dataset bg = gaussian_bg({"a", "dummy"}, 32, 11);
    const std::vector<double> phi = shapley_exact(lm, {0.7, 5.0}, bg);
    CHECK(std::abs(phi[1]) < 1e-12);
}

TEST_CASE("shapley with a single background row telescopes") {
    // With one background row z, v(S) = f(point on S, z off S); for a linear
    // model phi_j = beta_j (x_j - z_j) exactly.
    const LinearModel lm(-2.0, {"a", "b"}, {4.0, -3.0});
    const Dataset bg({"a", "b"}, {{1.0}, {2.0}});
    const std::vector<double> phi = shapley_exact(lm, {3.0, 1.0}, bg);
    CHECK(phi[0] == doctest::Approx(4.0 * (3.0 - 1.0)).epsilon(1e-12));
    CHECK(phi[1] == doctest::Approx(-3.0 * (1.0 - 2.0)).epsilon(1e-12));
}

TEST_CASE("forest fast path agrees with generic coalition evaluation") {
    const Scm scm = builtin_scm(BuiltinScm::Simple);
    const Dataset ds = sample(scm, 300, 14);
    const std::vector<std::string> predictors{"X", "D", "A", "K", "C"};
    FitConfig cfg;
    cfg.forest.n_trees = 15;
    const RandomForest rf = fit_forest(ds, "Y", predictors, cfg, 2);
    const Dataset bg = ds.select(predictors).take_rows({3, 8, 20, 44, 60, 71});

    // Wrap the forest in a plain Model facade so shapley_exact cannot detect
    // the forest type and must take the generic chunked-evaluation route.
    struct Facade : Model {
        const RandomForest* inner;
        const std::vector<std::string>& predictor_names() const override {
            return inner->predictor_names();
        }
        void predict_rows(const double* rows, std::size_t n, double* out) const override {
            inner->predict_rows(rows, n, out);
        }
    };
    Facade facade;
    facade.inner = &rf;

    for (const std::size_t r : {0ul, 5ul, 9ul}) {
        std::vector<double> point(predictors.size());
        for (std::size_t j = 0; j < predictors.size(); ++j)
            point[j] = ds.col(predictors[j])[r];
        const std::vector<double> fast = shapley_exact(rf, point, bg);
        const std::vector<double> generic = shapley_exact(facade, point, bg);
        REQUIRE(fast.size() == generic.size());
        for (std::size_t j = 0; j < fast.size(); ++j)
            CHECK(std::abs(fast[j] - generic[j]) < 1e-9);
    }
}

TEST_CASE("shapley_report aggregates mean absolute attributions") {
    const LinearModel lm(0.0, {"a", "b"}, {2.0, -1.0});
    const Dataset test({"a", "b"}, {{1.0, -1.0, 2.0}, {0.5, 0.5, -0.5}});
    const Dataset bg({"a", "b"}, {{0.0}, {0.0}});
    const auto [matrix, report] = shapley_report(lm, test, bg, {"a", "b"}, "LR-coefs");
    REQUIRE(matrix.n_rows == 3);
    REQUIRE(matrix.predictors == std::vector<std::string>{"a", "b"});
    // With a single zero background row, phi = beta_j * x_j exactly.
    CHECK(matrix.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(matrix.at(1, 0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(matrix.at(2, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(matrix.baseline == doctest::Approx(0.0).epsilon(1e-12));
    // raw importance = mean |phi| per column.
    CHECK(report.raw_of("a") == doctest::Approx((2.0 + 2.0 + 4.0) / 3.0).epsilon(1e-12));
    CHECK(report.raw_of("b") == doctest::Approx(0.5).epsilon(1e-12));
    // signed means.
    CHECK(matrix.signed_mean[0] == doctest::Approx((2.0 - 2.0 + 4.0) / 3.0).epsilon(1e-12));
    CHECK(report.method == "LR-coefs");
}

TEST_CASE("shapley rejects oversized and empty inputs") {
    std::vector<std::string> names;
    std::vector<double> point;
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < 21; ++j) {
        names.push_back("f" + std::to_string(j));
        point.push_back(0.0);
        cols.push_back({0.0, 1.0});
    }
    const LinearModel big(0.0, names, std::vector<double>(21, 1.0));
    const Dataset bg(names, cols);
    CHECK_THROWS_AS(shapley_exact(big, point, bg), TooManyFeaturesError);

    const LinearModel lm(0.0, {"a"}, {1.0});
    CHECK_THROWS_AS(shapley_exact(lm, {1.0}, nullptr, 0), EmptyBackgroundError);
    CHECK_THROWS_AS(shapley_exact(lm, {1.0, 2.0}, Dataset({"a"}, {{0.0}})), LengthMismatchError);
}

TEST_CASE("range normalization preserves order and handles constants") {
    const ImportanceReport r = make_report("RF-imps", {"a", "b", "c", "d"},
                                           {3.0, -1.0, 7.0, 3.0});
    CHECK(r.normalized_of("b") == 0.0);
    CHECK(r.normalized_of("c") == 1.0);
    CHECK(r.normalized_of("a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.normalized_of("a") == r.normalized_of("d"));
    // Order preservation.
    CHECK(r.normalized_of("b") < r.normalized_of("a"));
    CHECK(r.normalized_of("a") < r.normalized_of("c"));

    const ImportanceReport flat = make_report("RF-imps", {"a", "b"}, {2.0, 2.0});
    CHECK(flat.normalized == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(make_report("x", {"a"}, {1.0, 2.0}), LengthMismatchError);
    CHECK_THROWS_AS(make_report("x", {}, {}), ValidationError);
}

TEST_CASE("coef report takes absolute coefficient values") {
    const LinearModel lm(5.0, {"a", "b", "c"}, {-3.0, 0.5, 2.0});
    const ImportanceReport r = coef_report(lm);
    CHECK(r.method == "LR-coefs");
    CHECK(r.raw == std::vector<double>{3.0, 0.5, 2.0});
    CHECK(r.normalized_of("a") == 1.0);
    CHECK(r.normalized_of("b") == 0.0);
}

TEST_CASE("impurity importances find the only informative feature") {
    // y is a function of x alone; noise features carry no signal.
    Rng rng(8);
    std::vector<double> x(500), n1(500), n2(500), y(500);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.next_gaussian();
        n1[i] = rng.next_gaussian();
        n2[i] = rng.next_gaussian();
        y[i] = 3.0 * x[i];
    }
    const Dataset ds({"x", "n1", "n2", "y"}, {x, n1, n2, y});
    FitConfig cfg;
    cfg.forest.n_trees = 20;
    cfg.forest.min_leaf = 5;
    const RandomForest rf = fit_forest(ds, "y", cfg, 1);
    const ImportanceReport r = impurity_importances(rf, {"x", "n1", "n2"});
    CHECK(r.method == "RF-imps");
    CHECK(r.raw_of("x") > 0.9);
    const double total = std::accumulate(r.raw.begin(), r.raw.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.raw_of("n1") >= 0.0);
    CHECK(r.raw_of("n2") >= 0.0);
}

TEST_CASE("constant outcome yields zero impurity importances") {
    const Dataset ds({"x", "z", "y"},
                     {{1.0, 2.0, 3.0, 4.0}, {4.0, 3.0, 2.0, 1.0}, {5.0, 5.0, 5.0, 5.0}});
    FitConfig cfg;
    cfg.forest.n_trees = 5;
    const RandomForest rf = fit_forest(ds, "y", cfg, 0);
    const ImportanceReport r = impurity_importances(rf, {"x", "z"});
    CHECK(r.raw == std::vector<double>{0.0, 0.0});
    CHECK(r.normalized == std::vector<double>{0.0, 0.0});
}

TEST_CASE("report lookups reject unknown predictors") {
    const ImportanceReport r = make_report("bi-corrs", {"a"}, {1.0});
    CHECK_THROWS_AS(r.raw_of("zz"), MissingPredictorError);
    CHECK_THROWS_AS(r.normalized_of("zz"), MissingPredictorError);
}
