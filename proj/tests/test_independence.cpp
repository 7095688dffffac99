#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "causalkit/dataset.hpp"
#include "causalkit/errors.hpp"
#include "causalkit/independence.hpp"
#include "causalkit/linear_model.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/scm.hpp"

using namespace causalkit;

namespace {

// Two independent standard normal columns.
Dataset null_pair(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.next_gaussian();
        y[i] = rng.next_gaussian();
    }
    return Dataset({"x", "y"}, {std::move(x), std::move(y)});
}

// Bivariate normal with the given correlation.
Dataset correlated_pair(std::size_t n, double rho, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n), y(n);
    const double tail = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.next_gaussian();
        y[i] = rho * x[i] + tail * rng.next_gaussian();
    }
    return Dataset({"x", "y"}, {std::move(x), std::move(y)});
}

Dataset chain_data(std::size_t n, std::uint64_t seed) {
    const Scm scm(std::vector<NodeAssignment>{
        {"X1", {}, 1.0}, {"X2", {{"X1", 1.0}}, 1.0}, {"Y", {{"X2", 1.0}}, 1.0}});
    return sample(scm, n, seed);
}

Dataset collider_data(std::size_t n, std::uint64_t seed) {
    const Scm scm(std::vector<NodeAssignment>{
        {"A", {}, 1.0}, {"C", {}, 1.0}, {"B", {{"A", 1.0}, {"C", 1.0}}, 1.0}});
    return sample(scm, n, seed);
}

// Kolmogorov-Smirnov distance of a sample against Uniform(0,1).
double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(p[i] - lo), std::abs(p[i] - hi)});
    }
    return d;
}

constexpr double kMiAtPoint6 = 0.22314355131420976;  // -0.5*ln(1 - 0.36)

}  // namespace

TEST_CASE("discrete entropy hits the closed forms") {
    CHECK(entropy_discrete({0.0, 1.0, 0.0, 1.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(entropy_discrete({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(entropy_discrete({7.0, 7.0, 7.0}) == 0.0);
    // Entropy depends only on frequencies, not on the labels.
    CHECK(entropy_discrete({1.0, 1.0, 2.0}) ==
          doctest::Approx(entropy_discrete({-5.0, -5.0, 40.0})).epsilon(1e-15));
    CHECK_THROWS_AS(entropy_discrete({}), InsufficientSamplesError);
}

TEST_CASE("gaussian mi closed form") {
    // Engineered columns with sample correlation exactly 0.6:
    // x = (-1,0,1), z = (1,-2,1)/sqrt(3) is orthogonal to x and centered,
    // y = 0.6x + 0.8z has unit sample variance.
    const double s3 = std::sqrt(3.0);
    const std::vector<double> x{-1.0, 0.0, 1.0};
    const std::vector<double> y{-0.6 + 0.8 / s3, -1.6 / s3, 0.6 + 0.8 / s3};
    const Dataset ds({"x", "y"}, {x, y});
    const GaussianMiResult r = gaussian_mi(ds, "x", "y");
    CHECK(r.nats == doctest::Approx(kMiAtPoint6).epsilon(1e-9));
    CHECK_FALSE(r.saturated);

    // Uncorrelated columns give zero.
    const Dataset zero({"x", "y"}, {{-1.0, 1.0, -1.0, 1.0}, {-1.0, -1.0, 1.0, 1.0}});
    const GaussianMiResult z = gaussian_mi(zero, "x", "y");
    CHECK(z.nats == 0.0);

    // Deterministic relation saturates at the cap.
    const Dataset exact({"x", "y"}, {{1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}});
    const GaussianMiResult s = gaussian_mi(exact, "x", "y");
    CHECK(s.saturated);
    CHECK(s.nats == doctest::Approx(-0.5 * std::log(1e-15)).epsilon(1e-12));

    const Dataset constant({"x", "y"}, {{1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}});
    CHECK_THROWS_AS(gaussian_mi(constant, "x", "y"), ConstantColumnError);
}

TEST_CASE("knn mi tracks the gaussian oracle") {
    const Dataset dep = correlated_pair(2000, 0.6, 42);
    const KsgMiResult r = ksg_mi(dep, "x", "y", 3);
    CHECK(std::abs(r.raw - kMiAtPoint6) < 0.05);
    CHECK(r.clamped == std::max(0.0, r.raw));
}

TEST_CASE("knn mi is near zero for independent columns") {
    Rng rng(7);
    std::vector<double> x(2000), y(2000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.next_unit();
        y[i] = rng.next_unit();
    }
    const Dataset ds({"x", "y"}, {x, y});
    const KsgMiResult r = ksg_mi(ds, "x", "y", 3);
    CHECK(std::abs(r.raw) < 0.03);
    CHECK(r.clamped >= 0.0);
}

TEST_CASE("knn mi is large for a deterministic relation") {
    Rng rng(11);
    std::vector<double> x(1000);
    for (double& v : x) v = rng.next_gaussian();
    const Dataset ds({"x", "y"}, {x, x});
    CHECK(ksg_mi(ds, "x", "y", 3).raw > 2.0);
}

TEST_CASE("knn mi is exactly invariant under monotone maps") {
    const Dataset base = correlated_pair(500, 0.5, 3);
    const double reference = ksg_mi(base, "x", "y", 3).raw;

    std::vector<double> cubed = base.col("x");
    for (double& v : cubed) v = v * v * v;
    std::vector<double> exped = base.col("y");
    for (double& v : exped) v = std::exp(v);
    const Dataset mapped({"x", "y"}, {cubed, exped});
    CHECK(ksg_mi(mapped, "x", "y", 3).raw == reference);

    // Increasing affine map.
    std::vector<double> affine = base.col("x");
    for (double& v : affine) v = 3.0 * v - 2.0;
    const Dataset shifted({"x", "y"}, {affine, base.col("y")});
    CHECK(ksg_mi(shifted, "x", "y", 3).raw == reference);

    // Decreasing affine map reverses the ranks; max-norm rank distances are
    // preserved under reversal, so the estimate is still identical.
    std::vector<double> reversed = base.col("x");
    for (double& v : reversed) v = -2.0 * v + 1.0;
    const Dataset flipped({"x", "y"}, {reversed, base.col("y")});
    CHECK(ksg_mi(flipped, "x", "y", 3).raw == reference);
}

TEST_CASE("knn mi input validation") {
    const Dataset tiny({"x", "y"}, {{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}});
    CHECK_THROWS_AS(ksg_mi(tiny, "x", "y", 3), InsufficientSamplesError);
    CHECK_THROWS_AS(ksg_mi(tiny, "x", "y", 0), ValidationError);
}

TEST_CASE("permutation test pins strong dependence to the minimum p") {
    const Dataset ds = correlated_pair(500, 0.9, 5);
    const CiTestResult r = mi_perm_test(ds, "x", "y", 3, 99, 17);
    CHECK(r.p_value == doctest::Approx(1.0 / 100.0).epsilon(1e-12));
    CHECK_FALSE(r.independent);
    CHECK(r.statistic > 0.5);
}

TEST_CASE("permutation p-values live on the add-one grid") {
    const Dataset ds = null_pair(128, 23);
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const CiTestResult r = mi_perm_test(ds, "x", "y", 3, 19, seed);
        const double scaled = r.p_value * 20.0;
        CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
        CHECK(r.p_value >= 1.0 / 20.0);
        CHECK(r.p_value <= 1.0);
        CHECK(r.independent == (r.p_value > r.alpha));
    }
    CHECK_THROWS_AS(mi_perm_test(ds, "x", "y", 3, 18, 0), InsufficientSamplesError);
}

TEST_CASE("permutation test is calibrated under the null") {
    int rejections = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        const Dataset ds = null_pair(256, 1000 + static_cast<std::uint64_t>(rep));
        const CiTestResult r =
            mi_perm_test(ds, "x", "y", 3, 99, 5000 + static_cast<std::uint64_t>(rep));
        if (!r.independent) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate >= 0.01);
    CHECK(rate <= 0.12);
}

TEST_CASE("fisher-z separates chains and colliders") {
    const Dataset chain = chain_data(2000, 31);
    CHECK(fisher_z_ci(chain, "X1", "Y", {"X2"}, 0.01).independent);
    CHECK_FALSE(fisher_z_ci(chain, "X1", "Y", {}, 0.01).independent);
    CHECK_FALSE(fisher_z_ci(chain, "X1", "X2", {}, 0.01).independent);

    const Dataset collider = collider_data(2000, 32);
    CHECK(fisher_z_ci(collider, "A", "C", {}, 0.01).independent);
    CHECK_FALSE(fisher_z_ci(collider, "A", "C", {"B"}, 0.01).independent);
}

TEST_CASE("fisher-z with no conditioning matches the pearson p at large n") {
    const Dataset ds = null_pair(2000000, 77);
    const CiTestResult z = fisher_z_ci(ds, "x", "y", {}, 0.05);
    const PearsonResult t = pearson(ds, "x", "y");
    CHECK(std::abs(z.p_value - t.p) < 1e-6);
}

TEST_CASE("fisher-z partial correlation matches residual correlation") {
    const Scm scm = builtin_scm(BuiltinScm::Complex);
    const Dataset ds = sample(scm, 1500, 9);
    const auto partial_via_residuals = [&](const std::string& x, const std::string& y,
                                           const std::vector<std::string>& cond) {
        std::vector<std::string> cols = cond;
        cols.push_back(x);
        Dataset dx = ds.select(cols);
        cols.back() = y;
        Dataset dy = ds.select(cols);
        const LinearModel mx = fit_ols(dx, x, cond);
        const LinearModel my = fit_ols(dy, y, cond);
        const std::vector<double> px = predict(mx, ds);
        const std::vector<double> py = predict(my, ds);
        std::vector<double> rx(ds.n_rows()), ry(ds.n_rows());
        for (std::size_t i = 0; i < ds.n_rows(); ++i) {
            rx[i] = ds.col(x)[i] - px[i];
            ry[i] = ds.col(y)[i] - py[i];
        }
        return pearson_r(rx, ry);
    };
    for (const auto& [x, y, cond] :
         std::vector<std::tuple<std::string, std::string, std::vector<std::string>>>{
             {"X", "Y", {"K", "D"}}, {"F", "G", {"X"}}, {"C", "H", {"Y", "A"}}}) {
        const CiTestResult r = fisher_z_ci(ds, x, y, cond, 0.05);
        const double n_eff = static_cast<double>(ds.n_rows() - cond.size()) - 3.0;
        const double rho_from_stat = std::tanh(r.statistic / std::sqrt(n_eff));
        CHECK(std::abs(rho_from_stat - partial_via_residuals(x, y, cond)) < 1e-10);
    }
}

TEST_CASE("fisher-z null p-values are close to uniform") {
    std::vector<double> pvals;
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const Dataset ds = null_pair(100, 40000 + rep);
        pvals.push_back(fisher_z_ci(ds, "x", "y", {}, 0.05).p_value);
    }
    CHECK(ks_uniform(pvals) < 0.1);
}

TEST_CASE("fisher-z error paths") {
    const Dataset tiny = null_pair(3, 1);
    CHECK_THROWS_AS(fisher_z_ci(tiny, "x", "y", {}, 0.05), InsufficientSamplesError);

    // A conditioning column duplicating x makes the correlation matrix singular.
    Rng rng(4);
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.next_gaussian();
        y[i] = rng.next_gaussian();
    }
    const Dataset dup({"x", "y", "x2"}, {x, y, x});
    CHECK_THROWS_AS(fisher_z_ci(dup, "x", "y", {"x2"}, 0.05), SingularityError);
}

TEST_CASE("conditional mi with empty conditioning reduces to plain mi") {
    // rho=0.8 puts the true MI (~0.51 nats) far above the permutation
    // null's upper tail at N=400 (~0.15), so detection is unambiguous.
    const Dataset ds = correlated_pair(400, 0.8, 12);
    const CiTestResult c = cmi_knn(ds, "x", "y", {}, 3, 39, 8);
    const KsgMiResult m = ksg_mi(ds, "x", "y", 3);
    CHECK(c.statistic == doctest::Approx(m.raw).epsilon(1e-12));
    CHECK_FALSE(c.independent);
}

TEST_CASE("conditional mi recognizes the chain separation") {
    int correct = 0;
    const int runs = 20;
    for (int run = 0; run < runs; ++run) {
        const Dataset ds = chain_data(2000, 600 + static_cast<std::uint64_t>(run));
        const CiTestResult r =
            cmi_knn(ds, "X1", "Y", {"X2"}, 3, 39, 900 + static_cast<std::uint64_t>(run));
        if (r.independent) ++correct;
    }
    CHECK(correct >= 18);  // >= 90% of runs
}

TEST_CASE("conditional mi p-values are roughly calibrated on an independent triple") {
    std::vector<double> pvals;
    int rejections = 0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        Rng rng(7000 + rep);
        std::vector<double> x(300), y(300), z(300);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.next_gaussian();
            y[i] = rng.next_gaussian();
            z[i] = rng.next_gaussian();
        }
        const Dataset ds({"x", "y", "z"}, {x, y, z});
        const CiTestResult r = cmi_knn(ds, "x", "y", {"z"}, 3, 39, 100 + rep);
        pvals.push_back(r.p_value);
        if (!r.independent) ++rejections;
    }
    CHECK(rejections <= 5);  // level ~0.05 allows few false alarms in 20 runs
    double mean_p = 0.0;
    for (const double p : pvals) mean_p += p;
    mean_p /= static_cast<double>(pvals.size());
    CHECK(mean_p > 0.25);
    CHECK(mean_p < 0.85);
}

TEST_CASE("conditional mi input validation") {
    const Dataset tiny = null_pair(30, 2);
    CHECK_THROWS_AS(cmi_knn(tiny, "x", "y", {}, 3, 19, 0), InsufficientSamplesError);
    const Dataset ok = null_pair(100, 2);
    CHECK_THROWS_AS(cmi_knn(ok, "x", "y", {}, 3, 10, 0), InsufficientSamplesError);
}

TEST_CASE("tester facades agree with the direct calls") {
    const Dataset ds = chain_data(800, 3);
    const FisherZTester fisher(ds);
    CHECK(fisher.p_value("X1", "Y", {"X2"}) ==
          doctest::Approx(fisher_z_ci(ds, "X1", "Y", {"X2"}, 0.05).p_value).epsilon(1e-15));
    CHECK(fisher.p_value("X1", "X2", {}) ==
          doctest::Approx(fisher_z_ci(ds, "X1", "X2", {}, 0.05).p_value).epsilon(1e-15));

    // Per-call derived seeds make results independent of invocation order.
    const Dataset small = chain_data(300, 4);
    const CmiKnnTester a(small, 3, 19, 5);
    const CmiKnnTester b(small, 3, 19, 5);
    const double a1 = a.p_value("X1", "X2", {});
    const double a2 = a.p_value("X2", "Y", {"X1"});
    const double b2 = b.p_value("X2", "Y", {"X1"});
    const double b1 = b.p_value("X1", "X2", {});
    CHECK(a1 == b1);
    CHECK(a2 == b2);
}
