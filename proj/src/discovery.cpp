#include "causalkit/discovery.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>

#include "causalkit/errors.hpp"

namespace causalkit {

bool Skeleton::has_edge(int a, int b) const {
    const auto key = std::minmax(a, b);
    return std::binary_search(edges.begin(), edges.end(),
                              std::make_pair(key.first, key.second));
}

void SepsetTable::record(const std::string& a, const std::string& b,
                         std::vector<std::string> sepset) {
    auto key = std::minmax(a, b);
    entries_[{key.first, key.second}] = std::move(sepset);
}

std::optional<std::vector<std::string>> SepsetTable::find(const std::string& a,
                                                          const std::string& b) const {
    const auto key = std::minmax(a, b);
    const auto it = entries_.find({key.first, key.second});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

namespace {

// Visits every size-k combination of `items` (kept in input order) in
// lexicographic position order; stops early when f returns true.
template <typename F>
bool for_each_combination(const std::vector<int>& items, int k, F&& f) {
    const auto n = static_cast<int>(items.size());
    if (k > n) return false;
    std::vector<int> pick(static_cast<std::size_t>(k));
    std::vector<int> pos(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pos[static_cast<std::size_t>(i)] = i;
    while (true) {
        for (int i = 0; i < k; ++i)
            pick[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])];
        if (f(pick)) return true;
        int i = k - 1;
        while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++pos[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace

std::pair<Skeleton, SepsetTable> pc_skeleton(const std::vector<std::string>& nodes,
                                             const CiTester& test, double alpha,
                                             int max_cond) {
    if (max_cond < 0) throw ValidationError("pc_skeleton: max_cond must be >= 0");
    {
        std::set<std::string> seen;
        for (const auto& name : nodes)
            if (!seen.insert(name).second)
                throw DuplicateError("pc_skeleton: duplicate node '" + name + "'");
    }
    const auto n = static_cast<int>(nodes.size());
    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) adj[static_cast<std::size_t>(i)].insert(j);

    SepsetTable sepsets;
    for (int ell = 0; ell <= max_cond; ++ell) {
        std::vector<std::pair<int, int>> snapshot;
        for (int i = 0; i < n; ++i)
            for (const int j : adj[static_cast<std::size_t>(i)])
                if (i < j) snapshot.emplace_back(i, j);
        bool feasible = false;
        for (const auto& [x, y] : snapshot) {
            if (static_cast<int>(adj[static_cast<std::size_t>(x)].size()) - 1 >= ell ||
                static_cast<int>(adj[static_cast<std::size_t>(y)].size()) - 1 >= ell) {
                feasible = true;
                break;
            }
        }
        if (!feasible) break;

        for (const auto& [x, y] : snapshot) {
            if (adj[static_cast<std::size_t>(x)].count(y) == 0) continue;
            std::vector<int> cand_x;
            for (const int c : adj[static_cast<std::size_t>(x)])
                if (c != y) cand_x.push_back(c);
            std::vector<int> cand_y;
            for (const int c : adj[static_cast<std::size_t>(y)])
                if (c != x) cand_y.push_back(c);
            const std::set<int> cand_x_set(cand_x.begin(), cand_x.end());

            const auto try_side = [&](const std::vector<int>& side, bool skip_x_subsets) {
                return for_each_combination(side, ell, [&](const std::vector<int>& subset) {
                    if (skip_x_subsets) {
                        bool already = true;
                        for (const int c : subset)
                            if (cand_x_set.count(c) == 0) {
                                already = false;
                                break;
                            }
                        if (already) return false;  // tested from the x side
                    }
                    std::vector<std::string> cond;
                    cond.reserve(subset.size());
                    for (const int c : subset) cond.push_back(nodes[static_cast<std::size_t>(c)]);
                    const double p = test.p_value(nodes[static_cast<std::size_t>(x)],
                                                  nodes[static_cast<std::size_t>(y)], cond);
                    if (p > alpha) {
                        adj[static_cast<std::size_t>(x)].erase(y);
                        adj[static_cast<std::size_t>(y)].erase(x);
                        sepsets.record(nodes[static_cast<std::size_t>(x)],
                                       nodes[static_cast<std::size_t>(y)], cond);
                        return true;
                    }
                    return false;
                });
            };
            if (try_side(cand_x, false)) continue;
            try_side(cand_y, true);
        }
    }

    Skeleton skeleton;
    skeleton.nodes = nodes;
    for (int i = 0; i < n; ++i)
        for (const int j : adj[static_cast<std::size_t>(i)])
            if (i < j) skeleton.edges.emplace_back(i, j);
    return {std::move(skeleton), std::move(sepsets)};
}

Cpdag orient_v_structures(const Skeleton& skeleton, const SepsetTable& sepsets,
                          std::vector<OrientationConflict>* conflicts) {
    if (conflicts) conflicts->clear();
    const auto n = static_cast<int>(skeleton.nodes.size());
    const auto adjacent = [&](int a, int b) { return skeleton.has_edge(a, b); };

    std::set<std::pair<int, int>> claims;  // (from, to) pointing at colliders
    for (int x = 0; x < n; ++x) {
        for (int y = x + 1; y < n; ++y) {
            if (adjacent(x, y)) continue;
            const auto sep = sepsets.find(skeleton.nodes[static_cast<std::size_t>(x)],
                                          skeleton.nodes[static_cast<std::size_t>(y)]);
            if (!sep) continue;
            for (int z = 0; z < n; ++z) {
                if (z == x || z == y) continue;
                if (!adjacent(x, z) || !adjacent(z, y)) continue;
                const auto& z_name = skeleton.nodes[static_cast<std::size_t>(z)];
                if (std::find(sep->begin(), sep->end(), z_name) != sep->end()) continue;
                claims.insert({x, z});
                claims.insert({y, z});
            }
        }
    }

    std::vector<std::pair<std::string, std::string>> directed;
    std::vector<std::pair<std::string, std::string>> undirected;
    for (const auto& [i, j] : skeleton.edges) {
        const auto& ni = skeleton.nodes[static_cast<std::size_t>(i)];
        const auto& nj = skeleton.nodes[static_cast<std::size_t>(j)];
        const bool ij = claims.count({i, j}) > 0;
        const bool ji = claims.count({j, i}) > 0;
        if (ij && ji) {
            undirected.emplace_back(ni, nj);
            if (conflicts) conflicts->push_back({ni, nj});
        } else if (ij) {
            directed.emplace_back(ni, nj);
        } else if (ji) {
            directed.emplace_back(nj, ni);
        } else {
            undirected.emplace_back(ni, nj);
        }
    }
    return Cpdag(skeleton.nodes, directed, undirected);
}

namespace {

// Mutable adjacency-state view of a partially directed graph.
struct PdagState {
    int n = 0;
    std::vector<std::uint8_t> m;  // n*n: 1 = directed i->j, 2 = undirected

    explicit PdagState(const Cpdag& g) : n(static_cast<int>(g.nodes().size())) {
        m.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
        for (const auto& [f, t] : g.directed()) at(f, t) = 1;
        for (const auto& [a, b] : g.undirected()) {
            at(a, b) = 2;
            at(b, a) = 2;
        }
    }

    std::uint8_t& at(int i, int j) {
        return m[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)];
    }
    std::uint8_t at(int i, int j) const {
        return m[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)];
    }
    bool dir(int i, int j) const { return at(i, j) == 1; }
    bool und(int i, int j) const { return at(i, j) == 2; }
    bool adj(int i, int j) const { return at(i, j) != 0 || at(j, i) != 0; }
    void orient(int i, int j) {
        at(i, j) = 1;
        at(j, i) = 0;
    }
};

// True when one of the four Meek rules licenses orienting a -> b.
bool meek_orients(const PdagState& s, int a, int b) {
    // R1: c -> a, a - b, c and b non-adjacent.
    for (int c = 0; c < s.n; ++c)
        if (c != b && s.dir(c, a) && !s.adj(c, b)) return true;
    // R2: a -> c -> b with a - b.
    for (int c = 0; c < s.n; ++c)
        if (s.dir(a, c) && s.dir(c, b)) return true;
    // R3: a - c, a - d, c -> b, d -> b, c and d non-adjacent.
    for (int c = 0; c < s.n; ++c) {
        if (!s.und(a, c) || !s.dir(c, b)) continue;
        for (int d = c + 1; d < s.n; ++d)
            if (s.und(a, d) && s.dir(d, b) && !s.adj(c, d)) return true;
    }
    // R4: a - c, c -> d, d -> b, b and c non-adjacent, a and d adjacent.
    for (int c = 0; c < s.n; ++c) {
        if (c == b || !s.und(a, c) || s.adj(b, c)) continue;
        for (int d = 0; d < s.n; ++d)
            if (s.dir(c, d) && s.dir(d, b) && s.adj(a, d)) return true;
    }
    return false;
}

Cpdag state_to_cpdag(const PdagState& s, const std::vector<std::string>& nodes) {
    std::vector<std::pair<std::string, std::string>> directed;
    std::vector<std::pair<std::string, std::string>> undirected;
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
            if (s.dir(i, j))
                directed.emplace_back(nodes[static_cast<std::size_t>(i)],
                                      nodes[static_cast<std::size_t>(j)]);
            if (i < j && s.und(i, j))
                undirected.emplace_back(nodes[static_cast<std::size_t>(i)],
                                        nodes[static_cast<std::size_t>(j)]);
        }
    }
    return Cpdag(nodes, directed, undirected);
}

}  // namespace

Cpdag meek_rules(const Cpdag& pdag) {
    PdagState state(pdag);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> und_edges;
        for (int i = 0; i < state.n; ++i)
            for (int j = i + 1; j < state.n; ++j)
                if (state.und(i, j)) und_edges.emplace_back(i, j);
        for (const auto& [a, b] : und_edges) {
            if (!state.und(a, b)) continue;
            if (meek_orients(state, a, b)) {
                state.orient(a, b);
                changed = true;
            } else if (meek_orients(state, b, a)) {
                state.orient(b, a);
                changed = true;
            }
        }
    }
    return state_to_cpdag(state, pdag.nodes());
}

Cpdag pc(const std::vector<std::string>& nodes, const CiTester& test, double alpha,
         int max_cond) {
    const auto [skeleton, sepsets] = pc_skeleton(nodes, test, alpha, max_cond);
    return meek_rules(orient_v_structures(skeleton, sepsets));
}

Cpdag pc(const Dataset& ds, const CiTester& test, double alpha, int max_cond) {
    return pc(ds.columns(), test, alpha, max_cond);
}

Cpdag cpdag_from_dag(const Dag& dag) {
    const auto n = static_cast<int>(dag.size());
    const auto adjacent = [&](int a, int b) { return dag.has_edge(a, b) || dag.has_edge(b, a); };
    std::set<std::pair<int, int>> vstruct;
    for (int z = 0; z < n; ++z) {
        const auto& par = dag.parents(z);
        for (std::size_t i = 0; i < par.size(); ++i) {
            for (std::size_t j = i + 1; j < par.size(); ++j) {
                if (adjacent(par[i], par[j])) continue;
                vstruct.insert({par[i], z});
                vstruct.insert({par[j], z});
            }
        }
    }
    std::vector<std::pair<std::string, std::string>> directed;
    std::vector<std::pair<std::string, std::string>> undirected;
    for (const auto& [f, t] : dag.edges()) {
        if (vstruct.count({f, t}) > 0)
            directed.emplace_back(dag.name_of(f), dag.name_of(t));
        else
            undirected.emplace_back(dag.name_of(f), dag.name_of(t));
    }
    return meek_rules(Cpdag(dag.nodes(), directed, undirected));
}

double GraphOracleTester::p_value(const std::string& x, const std::string& y,
                                  const std::vector<std::string>& cond) const {
    const std::set<std::string> s(cond.begin(), cond.end());
    return d_separated(dag_, {x}, {y}, s) ? 1.0 : 0.0;
}

std::string format_cpdag(const Cpdag& g) {
    std::vector<std::pair<std::pair<int, int>, std::string>> rows;
    for (const auto& [f, t] : g.directed()) {
        const auto key = std::minmax(f, t);
        rows.push_back({{key.first, key.second}, g.name_of(f) + " -> " + g.name_of(t)});
    }
    for (const auto& [a, b] : g.undirected())
        rows.push_back({{a, b}, g.name_of(a) + " -- " + g.name_of(b)});
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [key, text] : rows) {
        (void)key;
        out += text;
        out += '\n';
    }
    return out;
}

}  // namespace causalkit
