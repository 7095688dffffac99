#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causalkit/dataset.hpp"
#include "causalkit/explain.hpp"
#include "causalkit/model.hpp"
#include "causalkit/scm.hpp"

namespace causalkit {

enum class Method { LrCoefs, RfImps, RfShap, NnShap, BiCorrs };

// Canonical report label: "LR-coefs", "RF-imps", "RF-Shap", "NN-Shap",
// "bi-corrs".
std::string method_label(Method m);

// Accepts canonical labels and their lower-case CLI spellings.
std::optional<Method> parse_method(const std::string& label);

struct ExplainSizes {
    std::size_t test = 1000;       // explained test points
    std::size_t background = 100;  // background rows for the value function
};

struct ExperimentConfig {
    std::string scm_source = "complex";  // builtin name or JSON file path
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    std::vector<std::string> predictors;  // empty = every non-outcome variable
    std::string outcome = "Y";
    bool standardize = true;
    std::vector<Method> methods;  // empty = all five
    ExplainSizes explain;
    FitConfig fit;
};

struct ExperimentResult {
    ExperimentConfig config;  // echo, with predictors/methods resolved
    std::vector<std::string> predictors;
    std::vector<ImportanceReport> reports;       // one per method, request order
    std::map<std::string, double> test_mse;      // keyed LR / RF / NN
    std::map<std::string, std::uint64_t> seeds;  // labeled derived seeds
    std::string started_at;                      // wall-clock provenance only;
                                                 // never written to outputs
};

// "simple" / "complex" builtins, else a path to an SCM JSON file.
Scm resolve_scm(const std::string& source);

// sample -> standardize -> 60/40 split -> fit the models the requested
// methods need -> assemble reports and test MSEs.  Deterministic given cfg.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct AuditRow {
    std::string a;
    std::string b;
    std::vector<std::string> cond;
    bool graph_independent = false;
    double p_value = 0.0;
    bool test_independent = false;
};

struct AuditResult {
    std::vector<AuditRow> rows;
    std::size_t n_agree = 0;
    double agreement = 0.0;
};

// Tests every graph-implied independence plus an equally sized seeded
// sample of d-connected triples with the Fisher z test, and reports how
// often the test decision matches the graph.
AuditResult audit_independencies(const ExperimentConfig& cfg, double alpha, int max_cond);

// Reproduction targets: "table1", "fig3", "fig4", "fig5".  Writes the
// target's files into outdir and returns their paths.
std::vector<std::string> reproduce(const std::string& target, const std::string& outdir);

}  // namespace causalkit
