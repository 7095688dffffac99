#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalkit/graph.hpp"
#include "causalkit/independence.hpp"

namespace causalkit {

// Undirected graph over named nodes; edges stored as index pairs (i < j).
struct Skeleton {
    std::vector<std::string> nodes;
    std::vector<std::pair<int, int>> edges;  // sorted

    bool has_edge(int a, int b) const;
};

// Conditioning sets that separated removed pairs during skeleton search.
class SepsetTable {
public:
    void record(const std::string& a, const std::string& b, std::vector<std::string> sepset);
    // Empty optional when the pair was never separated.
    std::optional<std::vector<std::string>> find(const std::string& a,
                                                 const std::string& b) const;

    const std::map<std::pair<std::string, std::string>, std::vector<std::string>>& entries()
        const {
        return entries_;
    }

private:
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> entries_;
};

// An undirected edge whose two candidate v-structures demanded opposite
// orientations; left undirected by the conflict rule.
struct OrientationConflict {
    std::string a;
    std::string b;
};

// PC skeleton phase: starts from the complete graph; for conditioning-set
// sizes 0..max_cond, scans edges in canonical order and, for each, subsets
// of adj(x)\{y} then adj(y)\{x} in lexicographic order, removing the edge
// on the first test with p > alpha.  Adjacency mutates live between tests.
std::pair<Skeleton, SepsetTable> pc_skeleton(const std::vector<std::string>& nodes,
                                             const CiTester& test, double alpha, int max_cond);

// Orients every unshielded triple x - z - y with z not in sepset(x, y) as
// x -> z <- y.  Edges claimed in both directions are left undirected and
// reported through `conflicts` when given.
Cpdag orient_v_structures(const Skeleton& skeleton, const SepsetTable& sepsets,
                          std::vector<OrientationConflict>* conflicts = nullptr);

// Meek rules R1-R4 to a fixed point; never creates a new v-structure or a
// directed cycle.
Cpdag meek_rules(const Cpdag& pdag);

// Full PC: skeleton -> v-structures -> Meek completion.
Cpdag pc(const Dataset& ds, const CiTester& test, double alpha, int max_cond);
Cpdag pc(const std::vector<std::string>& nodes, const CiTester& test, double alpha,
         int max_cond);

// The CPDAG of a DAG's Markov equivalence class (ground truth for audits).
Cpdag cpdag_from_dag(const Dag& dag);

// Oracle CI answers read off the true graph: p = 1 when d-separated, else 0.
class GraphOracleTester : public CiTester {
public:
    explicit GraphOracleTester(Dag dag) : dag_(std::move(dag)) {}
    double p_value(const std::string& x, const std::string& y,
                   const std::vector<std::string>& cond) const override;

private:
    Dag dag_;
};

// Edge-list text: one line per edge, "A -> B" or "A -- B", pairs in
// canonical order.
std::string format_cpdag(const Cpdag& g);

}  // namespace causalkit
