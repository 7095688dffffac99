#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "causalkit/dataset.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

// One structural assignment: node := sum(beta * parent) + Gaussian(0, sigma).
struct NodeAssignment {
    std::string node;
    std::map<std::string, double> parent_coefficients;
    double noise_std = 0.0;  // >= 0
};

// Linear-Gaussian structural causal model.  The governing DAG's edges are
// exactly the parent sets of the assignments; node order is declaration
// order.
class Scm {
public:
    explicit Scm(std::vector<NodeAssignment> assignments);

    const Dag& dag() const { return dag_; }
    const std::vector<NodeAssignment>& assignments() const { return assignments_; }
    const NodeAssignment& assignment(const std::string& node) const;

    bool operator==(const Scm& other) const;

private:
    std::vector<NodeAssignment> assignments_;
    Dag dag_;
};

// JSON spec: {"nodes": [{"name": ..., "parents": {name: coef}, "noise_std": ...}]}.
// Names match [A-Za-z_][A-Za-z0-9_]*; unknown keys are rejected.
Scm parse_scm(const std::string& text);

// Canonical form: nodes in declaration order, object keys sorted, numbers in
// shortest round-trip decimal.  parse(serialize(parse(t))) == parse(t).
std::string serialize_scm(const Scm& scm);

Scm load_scm_file(const std::filesystem::path& path);

// Ancestral sampling: n rows, one independent noise stream per node derived
// from (seed, node name), columns in declaration order.
Dataset sample(const Scm& scm, std::size_t n, std::uint64_t seed);

// Sum over all directed cause->effect paths of the product of path
// coefficients, computed by dynamic programming over topological order.
double total_causal_effect(const Scm& scm, const std::string& cause, const std::string& effect);

enum class BuiltinScm { Simple, Complex };

// simple: eight independent standard-Gaussian predictors, each feeding Y
// with coefficient 1, Y-noise std 1.
// complex: C -> X <- A, A -> K, X -> F, X -> D, D -> G, {K, D} -> Y, Y -> H
// with the published coefficients and noise scales.
Scm builtin_scm(BuiltinScm which);

}  // namespace causalkit
