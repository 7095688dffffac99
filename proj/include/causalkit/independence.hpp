#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalkit/dataset.hpp"

namespace causalkit {

// Outcome of a single (conditional) independence test at level alpha.
struct CiTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;  // p_value > alpha
    double alpha = 0.05;
};

// Empirical Shannon entropy in nats over exact-value frequencies.
double entropy_discrete(const std::vector<double>& samples);

struct GaussianMiResult {
    double nats = 0.0;
    bool saturated = false;  // |r| at the cap; true value unbounded
};

// Closed-form Gaussian mutual information -0.5*ln(1 - r^2), capped at
// -0.5*ln(1e-15) for |r| -> 1.
GaussianMiResult gaussian_mi(const Dataset& ds, const std::string& x, const std::string& y);

struct KsgMiResult {
    double raw = 0.0;      // estimator value; may dip slightly negative
    double clamped = 0.0;  // max(raw, 0)
};

// Kraskov-style kNN mutual information (estimator 1, max-norm):
// psi(k) + psi(N) - mean[psi(n_x + 1) + psi(n_y + 1)].  Samples are first
// mapped to their empirical ranks with seeded deterministic tie-breaking,
// which makes the estimate exactly invariant under strictly monotone maps.
KsgMiResult ksg_mi(const Dataset& ds, const std::string& x, const std::string& y, int k,
                   std::uint64_t tie_seed = 0);

// Permutation test of MI > 0: p = (1 + #{permuted MI >= observed}) /
// (1 + n_perm), permuting y with seeded shuffles.  Requires n_perm >= 19.
CiTestResult mi_perm_test(const Dataset& ds, const std::string& x, const std::string& y, int k,
                          int n_perm, std::uint64_t seed, double alpha = 0.05,
                          std::uint64_t tie_seed = 0);

// Fisher-z test of partial correlation given the conditioning columns.
// statistic = sqrt(N - |cond| - 3) * atanh(partial r), two-sided normal p.
CiTestResult fisher_z_ci(const Dataset& ds, const std::string& x, const std::string& y,
                         const std::vector<std::string>& cond, double alpha);

// Frenzel-Pompe-style conditional MI, psi(k) - mean[psi(n_xz+1) +
// psi(n_yz+1) - psi(n_z+1)], with a local-permutation p-value: each
// permutation reassigns y values among k_perm = 5 nearest neighbors in
// conditioning space (a full shuffle when cond is empty).  Requires
// N > 10*k.  With empty cond the estimate equals ksg_mi exactly.
CiTestResult cmi_knn(const Dataset& ds, const std::string& x, const std::string& y,
                     const std::vector<std::string>& cond, int k, int n_perm,
                     std::uint64_t seed, double alpha = 0.05, std::uint64_t tie_seed = 0);

// Conditional-independence test contract used by discovery: p-value for
// the null "x independent of y given cond".  Implementations hold a
// reference to their dataset; the caller keeps it alive.
class CiTester {
public:
    virtual ~CiTester() = default;
    virtual double p_value(const std::string& x, const std::string& y,
                           const std::vector<std::string>& cond) const = 0;
};

class FisherZTester : public CiTester {
public:
    explicit FisherZTester(const Dataset& ds) : ds_(&ds) {}
    double p_value(const std::string& x, const std::string& y,
                   const std::vector<std::string>& cond) const override;

private:
    const Dataset* ds_;
};

class CmiKnnTester : public CiTester {
public:
    CmiKnnTester(const Dataset& ds, int k, int n_perm, std::uint64_t seed)
        : ds_(&ds), k_(k), n_perm_(n_perm), seed_(seed) {}
    // Per-call seed derived from (seed, x, y, cond), so results do not
    // depend on test invocation order.
    double p_value(const std::string& x, const std::string& y,
                   const std::vector<std::string>& cond) const override;

private:
    const Dataset* ds_;
    int k_;
    int n_perm_;
    std::uint64_t seed_;
};

}  // namespace causalkit
