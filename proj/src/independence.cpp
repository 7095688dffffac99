#include "causalkit/independence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"
#include "causalkit/special.hpp"

namespace causalkit {

double entropy_discrete(const std::vector<double>& samples) {
    if (samples.empty()) throw InsufficientSamplesError("entropy_discrete: empty sample");
    std::map<double, std::size_t> counts;
    for (const double v : samples) ++counts[v];
    const auto n = static_cast<double>(samples.size());
    double h = 0.0;
    for (const auto& [value, count] : counts) {
        (void)value;
        const double p = static_cast<double>(count) / n;
        h -= p * std::log(p);
    }
    return h;
}

GaussianMiResult gaussian_mi(const Dataset& ds, const std::string& x, const std::string& y) {
    const double r = pearson_r(ds.col(x), ds.col(y));
    const double one_minus = 1.0 - r * r;
    GaussianMiResult result;
    if (one_minus < 1e-15) {
        result.nats = -0.5 * std::log(1e-15);
        result.saturated = true;
    } else {
        result.nats = -0.5 * std::log(one_minus);
    }
    return result;
}

namespace {

// Empirical ranks with deterministic seeded tie-breaking: indices are
// ordered by (value, per-index uniform draw), which is the zero-amplitude
// limit of adding a tiny seeded jitter before ranking.  Because only the
// order survives, the downstream estimate is exactly invariant under
// strictly monotone transformations of the column.
std::vector<int> rank_column(const std::vector<double>& values, std::uint64_t column_seed) {
    const std::size_t n = values.size();
    Rng rng(column_seed);
    std::vector<double> u(n);
    for (double& x : u) x = rng.next_unit();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto ia = static_cast<std::size_t>(a);
        const auto ib = static_cast<std::size_t>(b);
        if (values[ia] != values[ib]) return values[ia] < values[ib];
        if (u[ia] != u[ib]) return u[ia] < u[ib];
        return a < b;
    });
    std::vector<int> rank(n);
    for (std::size_t pos = 0; pos < n; ++pos)
        rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos);
    return rank;
}

// Kraskov estimator 1 on integer ranks (each a permutation of 0..N-1):
// psi(k) + psi(N) - mean[psi(n_x+1) + psi(n_y+1)], max-norm, with marginal
// counts taken strictly inside the k-th joint-neighbor distance.  On a rank
// grid the marginal counts have the closed form below.
double ksg_core(const std::vector<int>& rx, const std::vector<int>& ry, int k) {
    const auto n = static_cast<int>(rx.size());
    if (k < 1) throw ValidationError("ksg_mi: k must be >= 1");
    if (n <= k) throw InsufficientSamplesError("ksg_mi: need more samples than k");
    std::vector<int> dist(static_cast<std::size_t>(n) - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            dist[m++] = std::max(std::abs(rx[static_cast<std::size_t>(j)] -
                                          rx[static_cast<std::size_t>(i)]),
                                 std::abs(ry[static_cast<std::size_t>(j)] -
                                          ry[static_cast<std::size_t>(i)]));
        }
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        const int eps = dist[static_cast<std::size_t>(k - 1)];
        const auto strict_count = [&](int r) {
            // #{integers in (r-eps, r+eps) within [0, n-1]}, minus self.
            const int lo = std::max(0, r - eps + 1);
            const int hi = std::min(n - 1, r + eps - 1);
            return hi - lo;  // (hi - lo + 1) - 1
        };
        const int nx = strict_count(rx[static_cast<std::size_t>(i)]);
        const int ny = strict_count(ry[static_cast<std::size_t>(i)]);
        acc += digamma(nx + 1) + digamma(ny + 1);
    }
    return digamma(k) + digamma(n) - acc / n;
}

}  // namespace

KsgMiResult ksg_mi(const Dataset& ds, const std::string& x, const std::string& y, int k,
                   std::uint64_t tie_seed) {
    const auto rx = rank_column(ds.col(x), derive_seed(tie_seed, std::string_view(x)));
    const auto ry = rank_column(ds.col(y), derive_seed(tie_seed, std::string_view(y)));
    KsgMiResult result;
    result.raw = ksg_core(rx, ry, k);
    result.clamped = std::max(0.0, result.raw);
    return result;
}

CiTestResult mi_perm_test(const Dataset& ds, const std::string& x, const std::string& y, int k,
                          int n_perm, std::uint64_t seed, double alpha,
                          std::uint64_t tie_seed) {
    if (n_perm < 19) throw InsufficientSamplesError("mi_perm_test: n_perm must be >= 19");
    const auto rx = rank_column(ds.col(x), derive_seed(tie_seed, std::string_view(x)));
    const auto ry = rank_column(ds.col(y), derive_seed(tie_seed, std::string_view(y)));
    const double observed = ksg_core(rx, ry, k);
    int exceed = 0;
    std::vector<int> perm(ry.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> ry_perm(ry.size());
    for (int rep = 0; rep < n_perm; ++rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
        rng.shuffle(perm);
        for (std::size_t i = 0; i < perm.size(); ++i)
            ry_perm[i] = ry[static_cast<std::size_t>(perm[i])];
        if (ksg_core(rx, ry_perm, k) >= observed) ++exceed;
    }
    CiTestResult result;
    result.statistic = observed;
    result.p_value = (1.0 + exceed) / (1.0 + n_perm);
    result.alpha = alpha;
    result.independent = result.p_value > alpha;
    return result;
}

namespace {

// In-place Gauss-Jordan inverse with partial pivoting; m is small (the
// conditioning set plus two).
void invert_matrix(std::vector<double>& a, std::size_t m) {
    std::vector<double> inv(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = 1.0;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r * m + col]) > std::abs(a[pivot * m + col])) pivot = r;
        if (std::abs(a[pivot * m + col]) < 1e-12)
            throw SingularityError("fisher_z_ci: correlation matrix is singular");
        if (pivot != col) {
            for (std::size_t c = 0; c < m; ++c) {
                std::swap(a[pivot * m + c], a[col * m + c]);
                std::swap(inv[pivot * m + c], inv[col * m + c]);
            }
        }
        const double d = a[col * m + col];
        for (std::size_t c = 0; c < m; ++c) {
            a[col * m + c] /= d;
            inv[col * m + c] /= d;
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double factor = a[r * m + col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < m; ++c) {
                a[r * m + c] -= factor * a[col * m + c];
                inv[r * m + c] -= factor * inv[col * m + c];
            }
        }
    }
    a = std::move(inv);
}

}  // namespace

CiTestResult fisher_z_ci(const Dataset& ds, const std::string& x, const std::string& y,
                         const std::vector<std::string>& cond, double alpha) {
    const auto n = static_cast<double>(ds.n_rows());
    const auto c = static_cast<double>(cond.size());
    if (n - c - 3.0 < 1.0)
        throw InsufficientSamplesError("fisher_z_ci: need N - |cond| - 3 >= 1");
    std::vector<const std::vector<double>*> cols{&ds.col(x), &ds.col(y)};
    for (const auto& name : cond) cols.push_back(&ds.col(name));
    const std::size_t m = cols.size();
    std::vector<double> corr(m * m, 1.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            corr[i * m + j] = corr[j * m + i] = pearson_r(*cols[i], *cols[j]);
    invert_matrix(corr, m);
    double rho = -corr[1] / std::sqrt(corr[0] * corr[m + 1]);
    rho = std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15);
    const double z = 0.5 * std::log((1.0 + rho) / (1.0 - rho));
    const double stat = std::sqrt(n - c - 3.0) * z;
    CiTestResult result;
    result.statistic = stat;
    result.p_value = erfc(std::abs(stat) / std::sqrt(2.0));
    result.alpha = alpha;
    result.independent = result.p_value > alpha;
    return result;
}

namespace {

struct CmiRanks {
    std::vector<int> rx;
    std::vector<int> ry;
    std::vector<std::vector<int>> rz;
};

// Frenzel-Pompe conditional MI on integer ranks: psi(k) - mean[psi(n_xz+1)
// + psi(n_yz+1) - psi(n_z+1)] with max-norm balls of the k-th joint-
// neighbor radius.  With no conditioning columns n_z = N-1 and this equals
// ksg_core exactly.
double cmi_core(const std::vector<int>& rx, const std::vector<int>& ry,
                const std::vector<std::vector<int>>& rz, int k) {
    const auto n = static_cast<int>(rx.size());
    std::vector<int> dz(static_cast<std::size_t>(n));
    std::vector<int> dxz(static_cast<std::size_t>(n));
    std::vector<int> dyz(static_cast<std::size_t>(n));
    std::vector<int> joint(static_cast<std::size_t>(n));
    std::vector<int> scratch;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        for (int j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            int z_dist = 0;
            for (const auto& col : rz)
                z_dist = std::max(z_dist, std::abs(col[uj] - col[ui]));
            dz[uj] = z_dist;
            dxz[uj] = std::max(z_dist, std::abs(rx[uj] - rx[ui]));
            dyz[uj] = std::max(z_dist, std::abs(ry[uj] - ry[ui]));
            joint[uj] = std::max(dxz[uj], dyz[uj]);
        }
        joint[ui] = std::numeric_limits<int>::max();  // exclude self
        scratch = joint;
        std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
        const int eps = scratch[static_cast<std::size_t>(k - 1)];
        int n_z = 0, n_xz = 0, n_yz = 0;
        for (int j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            if (j == i) continue;
            if (dz[uj] < eps) ++n_z;
            if (dxz[uj] < eps) ++n_xz;
            if (dyz[uj] < eps) ++n_yz;
        }
        acc += digamma(n_xz + 1) + digamma(n_yz + 1) - digamma(n_z + 1);
    }
    return digamma(k) - acc / n;
}

// k_perm nearest neighbors of every point in conditioning space, ties
// broken by index.
std::vector<std::vector<int>> cond_neighbors(const std::vector<std::vector<int>>& rz,
                                             std::size_t n, int k_perm) {
    std::vector<std::vector<int>> neighbors(n);
    std::vector<std::pair<int, int>> dist(n);  // (distance, index)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            int z_dist = 0;
            for (const auto& col : rz)
                z_dist = std::max(z_dist, std::abs(col[j] - col[i]));
            dist[j] = {j == i ? std::numeric_limits<int>::max() : z_dist,
                       static_cast<int>(j)};
        }
        std::partial_sort(dist.begin(), dist.begin() + k_perm, dist.end());
        neighbors[i].reserve(static_cast<std::size_t>(k_perm));
        for (int t = 0; t < k_perm; ++t) neighbors[i].push_back(dist[static_cast<std::size_t>(t)].second);
    }
    return neighbors;
}

}  // namespace

CiTestResult cmi_knn(const Dataset& ds, const std::string& x, const std::string& y,
                     const std::vector<std::string>& cond, int k, int n_perm,
                     std::uint64_t seed, double alpha, std::uint64_t tie_seed) {
    const auto n = ds.n_rows();
    if (k < 1) throw ValidationError("cmi_knn: k must be >= 1");
    if (static_cast<int>(n) <= 10 * k)
        throw InsufficientSamplesError("cmi_knn: need N > 10*k");
    if (n_perm < 19) throw InsufficientSamplesError("cmi_knn: n_perm must be >= 19");

    CmiRanks ranks;
    ranks.rx = rank_column(ds.col(x), derive_seed(tie_seed, std::string_view(x)));
    ranks.ry = rank_column(ds.col(y), derive_seed(tie_seed, std::string_view(y)));
    for (const auto& name : cond)
        ranks.rz.push_back(rank_column(ds.col(name), derive_seed(tie_seed, std::string_view(name))));

    const double observed = cmi_core(ranks.rx, ranks.ry, ranks.rz, k);

    constexpr int k_perm = 5;
    std::vector<std::vector<int>> neighbors;
    if (!ranks.rz.empty()) neighbors = cond_neighbors(ranks.rz, n, k_perm);

    int exceed = 0;
    std::vector<int> order(n);
    std::vector<int> ry_perm(n);
    std::vector<bool> used(n);
    std::vector<int> candidates;
    for (int rep = 0; rep < n_perm; ++rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
        if (ranks.rz.empty()) {
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            for (std::size_t i = 0; i < n; ++i)
                ry_perm[i] = ranks.ry[static_cast<std::size_t>(order[i])];
        } else {
            // Local permutation: each point swaps its y value with one of
            // its k_perm nearest conditioning-space neighbors, visiting
            // points in shuffled order and preferring unused donors so the
            // map stays close to a bijection.
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            std::fill(used.begin(), used.end(), false);
            for (const int i : order) {
                candidates = neighbors[static_cast<std::size_t>(i)];
                rng.shuffle(candidates);
                int chosen = -1;
                for (const int cand : candidates) {
                    if (!used[static_cast<std::size_t>(cand)]) {
                        chosen = cand;
                        break;
                    }
                }
                if (chosen < 0)
                    chosen = candidates[static_cast<std::size_t>(rng.next_below(candidates.size()))];
                used[static_cast<std::size_t>(chosen)] = true;
                ry_perm[static_cast<std::size_t>(i)] = ranks.ry[static_cast<std::size_t>(chosen)];
            }
        }
        if (cmi_core(ranks.rx, ry_perm, ranks.rz, k) >= observed) ++exceed;
    }

    CiTestResult result;
    result.statistic = observed;
    result.p_value = (1.0 + exceed) / (1.0 + n_perm);
    result.alpha = alpha;
    result.independent = result.p_value > alpha;
    return result;
}

double FisherZTester::p_value(const std::string& x, const std::string& y,
                              const std::vector<std::string>& cond) const {
    return fisher_z_ci(*ds_, x, y, cond, 0.05).p_value;
}

double CmiKnnTester::p_value(const std::string& x, const std::string& y,
                             const std::vector<std::string>& cond) const {
    std::string label = x + "|" + y + "|";
    for (const auto& name : cond) {
        label += name;
        label += ',';
    }
    return cmi_knn(*ds_, x, y, cond, k_, n_perm_, derive_seed(seed_, std::string_view(label)))
        .p_value;
}

}  // namespace causalkit
