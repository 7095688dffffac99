#include "causalkit/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "causalkit/errors.hpp"

namespace causalkit {

namespace {

std::map<std::string, int> index_names(const std::vector<std::string>& nodes) {
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!idx.emplace(nodes[i], static_cast<int>(i)).second)
            throw DuplicateError("duplicate node name: " + nodes[i]);
    }
    return idx;
}

int lookup(const std::map<std::string, int>& idx, const std::string& name) {
    const auto it = idx.find(name);
    if (it == idx.end()) throw UnknownNodeError("unknown node: " + name);
    return it->second;
}

}  // namespace

Dag::Dag(std::vector<std::string> nodes,
         const std::vector<std::pair<std::string, std::string>>& edges)
    : nodes_(std::move(nodes)) {
    const auto idx = index_names(nodes_);
    const std::size_t n = nodes_.size();
    parents_.resize(n);
    children_.resize(n);
    for (const auto& [from, to] : edges) {
        const int f = lookup(idx, from);
        const int t = lookup(idx, to);
        if (f == t) throw CycleError("self-loop on node: " + from);
        edges_.emplace_back(f, t);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw DuplicateError("duplicate edge");
    for (const auto& [f, t] : edges_) {
        children_[static_cast<std::size_t>(f)].push_back(t);
        parents_[static_cast<std::size_t>(t)].push_back(f);
    }
    // Kahn's algorithm; the min-index frontier keeps the order canonical.
    std::vector<int> remaining(n);
    for (std::size_t i = 0; i < n; ++i)
        remaining[i] = static_cast<int>(parents_[i].size());
    std::vector<bool> emitted(n, false);
    topo_.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        int next = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (!emitted[i] && remaining[i] == 0) {
                next = static_cast<int>(i);
                break;
            }
        }
        if (next < 0) throw CycleError("edge set admits no topological order");
        emitted[static_cast<std::size_t>(next)] = true;
        topo_.push_back(next);
        for (const int c : children_[static_cast<std::size_t>(next)])
            --remaining[static_cast<std::size_t>(c)];
    }
}

int Dag::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i] == name) return static_cast<int>(i);
    throw UnknownNodeError("unknown node: " + name);
}

bool Dag::has_edge(int from, int to) const {
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(from, to));
}

Dag build_dag(const std::vector<std::string>& nodes,
              const std::vector<std::pair<std::string, std::string>>& edges) {
    return Dag(nodes, edges);
}

std::vector<std::string> relatives(const Dag& dag, const std::string& node, Relation kind) {
    const int start = dag.index_of(node);
    const bool transitive = kind == Relation::Ancestors || kind == Relation::Descendants;
    const bool upward = kind == Relation::Parents || kind == Relation::Ancestors;
    std::vector<bool> seen(dag.size(), false);
    std::deque<int> frontier{start};
    std::vector<int> found;
    while (!frontier.empty()) {
        const int cur = frontier.front();
        frontier.pop_front();
        const auto& next = upward ? dag.parents(cur) : dag.children(cur);
        for (const int m : next) {
            if (seen[static_cast<std::size_t>(m)]) continue;
            seen[static_cast<std::size_t>(m)] = true;
            found.push_back(m);
            if (transitive) frontier.push_back(m);
        }
        if (!transitive) break;
    }
    std::sort(found.begin(), found.end());
    std::vector<std::string> names;
    names.reserve(found.size());
    for (const int i : found) names.push_back(dag.name_of(i));
    return names;
}

namespace {

// Reachability ("Bayes-ball") d-connection check.  `from_child` marks the
// direction the trail entered a node: true when it arrived from a child
// (moving against an edge), false when it arrived from a parent.
bool d_connected_reach(const Dag& dag, const std::vector<int>& sources,
                       const std::vector<bool>& in_s, const std::vector<bool>& targets) {
    const std::size_t n = dag.size();
    // Conditioning nodes and their ancestors: the set through which a
    // collider can be activated.
    std::vector<bool> anc_s(n, false);
    std::deque<int> work;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_s[i]) {
            anc_s[i] = true;
            work.push_back(static_cast<int>(i));
        }
    }
    while (!work.empty()) {
        const int cur = work.front();
        work.pop_front();
        for (const int p : dag.parents(cur)) {
            if (!anc_s[static_cast<std::size_t>(p)]) {
                anc_s[static_cast<std::size_t>(p)] = true;
                work.push_back(p);
            }
        }
    }

    // State = (node, entered-from-child?).
    std::vector<bool> visited_up(n, false), visited_down(n, false);
    std::deque<std::pair<int, bool>> queue;
    for (const int s : sources) queue.emplace_back(s, true);
    while (!queue.empty()) {
        const auto [cur, from_child] = queue.front();
        queue.pop_front();
        auto& visited = from_child ? visited_up : visited_down;
        if (visited[static_cast<std::size_t>(cur)]) continue;
        visited[static_cast<std::size_t>(cur)] = true;
        const bool observed = in_s[static_cast<std::size_t>(cur)];
        if (!observed && targets[static_cast<std::size_t>(cur)]) return true;
        if (from_child) {
            // Non-collider at cur regardless of exit direction: blocked iff
            // observed.
            if (!observed) {
                for (const int p : dag.parents(cur)) queue.emplace_back(p, true);
                for (const int c : dag.children(cur)) queue.emplace_back(c, false);
            }
        } else {
            // Entered from a parent: moving on to a child keeps cur a
            // non-collider; moving back to a parent makes cur a collider,
            // active iff cur is in S or has a descendant in S.
            if (!observed)
                for (const int c : dag.children(cur)) queue.emplace_back(c, false);
            if (anc_s[static_cast<std::size_t>(cur)])
                for (const int p : dag.parents(cur)) queue.emplace_back(p, true);
        }
    }
    return false;
}

}  // namespace

bool d_separated(const Dag& dag, const std::set<std::string>& a,
                 const std::set<std::string>& b, const std::set<std::string>& s) {
    const std::size_t n = dag.size();
    std::vector<int> membership(n, 0);
    auto mark = [&](const std::set<std::string>& names, int tag) {
        for (const auto& name : names) {
            const int i = dag.index_of(name);
            if (membership[static_cast<std::size_t>(i)] != 0)
                throw OverlapError("d_separated: sets must be pairwise disjoint (node " + name + ")");
            membership[static_cast<std::size_t>(i)] = tag;
        }
    };
    mark(a, 1);
    mark(b, 2);
    mark(s, 3);
    std::vector<int> sources;
    std::vector<bool> in_s(n, false), targets(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (membership[i] == 1) sources.push_back(static_cast<int>(i));
        if (membership[i] == 2) targets[i] = true;
        if (membership[i] == 3) in_s[i] = true;
    }
    if (sources.empty() || b.empty()) return true;
    return !d_connected_reach(dag, sources, in_s, targets);
}

bool d_separated_idx(const Dag& dag, int a, int b, const std::vector<bool>& in_s) {
    std::vector<bool> targets(dag.size(), false);
    targets[static_cast<std::size_t>(b)] = true;
    return !d_connected_reach(dag, {a}, in_s, targets);
}

std::vector<Independence> implied_independencies(const Dag& dag, int max_cond) {
    if (max_cond < 0) throw ValidationError("implied_independencies: max_cond must be >= 0");
    const int n = static_cast<int>(dag.size());
    std::vector<Independence> out;
    std::vector<bool> in_s(dag.size(), false);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            std::vector<int> rest;
            for (int m = 0; m < n; ++m)
                if (m != a && m != b) rest.push_back(m);
            const int limit = std::min<int>(max_cond, static_cast<int>(rest.size()));
            for (int size = 0; size <= limit; ++size) {
                // Lexicographic combinations of `rest` of the given size.
                std::vector<int> pick(static_cast<std::size_t>(size));
                for (int i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
                for (;;) {
                    std::fill(in_s.begin(), in_s.end(), false);
                    for (const int i : pick)
                        in_s[static_cast<std::size_t>(rest[static_cast<std::size_t>(i)])] = true;
                    if (d_separated_idx(dag, a, b, in_s)) {
                        Independence ind;
                        ind.a = dag.name_of(a);
                        ind.b = dag.name_of(b);
                        for (const int i : pick)
                            ind.cond.push_back(dag.name_of(rest[static_cast<std::size_t>(i)]));
                        out.push_back(std::move(ind));
                    }
                    // Advance to the next combination.
                    int pos = size - 1;
                    while (pos >= 0 &&
                           pick[static_cast<std::size_t>(pos)] ==
                               static_cast<int>(rest.size()) - size + pos)
                        --pos;
                    if (pos < 0) break;
                    ++pick[static_cast<std::size_t>(pos)];
                    for (int i = pos + 1; i < size; ++i)
                        pick[static_cast<std::size_t>(i)] = pick[static_cast<std::size_t>(i - 1)] + 1;
                }
            }
        }
    }
    return out;
}

Cpdag::Cpdag(std::vector<std::string> nodes,
             const std::vector<std::pair<std::string, std::string>>& directed,
             const std::vector<std::pair<std::string, std::string>>& undirected)
    : nodes_(std::move(nodes)) {
    const auto idx = index_names(nodes_);
    std::set<std::pair<int, int>> seen_pairs;  // unordered endpoints
    auto note_pair = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        if (!seen_pairs.insert({key.first, key.second}).second)
            throw DuplicateError("edge listed twice between " + nodes_[static_cast<std::size_t>(a)] +
                                 " and " + nodes_[static_cast<std::size_t>(b)]);
    };
    for (const auto& [from, to] : directed) {
        const int f = lookup(idx, from);
        const int t = lookup(idx, to);
        if (f == t) throw CycleError("self-loop on node: " + from);
        note_pair(f, t);
        directed_.emplace_back(f, t);
    }
    for (const auto& [a, b] : undirected) {
        const int i = lookup(idx, a);
        const int j = lookup(idx, b);
        if (i == j) throw CycleError("self-loop on node: " + a);
        note_pair(i, j);
        undirected_.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(directed_.begin(), directed_.end());
    std::sort(undirected_.begin(), undirected_.end());
}

int Cpdag::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i] == name) return static_cast<int>(i);
    throw UnknownNodeError("unknown node: " + name);
}

bool Cpdag::has_directed(int from, int to) const {
    return std::binary_search(directed_.begin(), directed_.end(), std::make_pair(from, to));
}

bool Cpdag::has_undirected(int a, int b) const {
    const auto key = std::minmax(a, b);
    return std::binary_search(undirected_.begin(), undirected_.end(),
                              std::make_pair(key.first, key.second));
}

bool Cpdag::adjacent(int a, int b) const {
    return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
}

int shd(const Cpdag& g1, const Cpdag& g2) {
    std::vector<std::string> sorted1 = g1.nodes(), sorted2 = g2.nodes();
    std::sort(sorted1.begin(), sorted1.end());
    std::sort(sorted2.begin(), sorted2.end());
    if (sorted1 != sorted2) throw NodeMismatchError("shd: graphs have different node sets");

    // Edge state per unordered name pair: 1 undirected, 2 lo->hi, 3 hi->lo
    // (names compared lexicographically; absent pairs omitted).
    auto states = [](const Cpdag& g) {
        std::map<std::pair<std::string, std::string>, int> m;
        for (const auto& [f, t] : g.directed()) {
            std::string from = g.name_of(f), to = g.name_of(t);
            if (from < to)
                m[{from, to}] = 2;
            else
                m[{to, from}] = 3;
        }
        for (const auto& [a, b] : g.undirected()) {
            std::string x = g.name_of(a), y = g.name_of(b);
            if (y < x) std::swap(x, y);
            m[{x, y}] = 1;
        }
        return m;
    };
    const auto m1 = states(g1);
    const auto m2 = states(g2);
    int count = 0;
    for (const auto& [pair, state] : m1) {
        const auto it = m2.find(pair);
        if (it == m2.end() || it->second != state) ++count;
    }
    for (const auto& [pair, state] : m2) {
        (void)state;
        if (!m1.contains(pair)) ++count;
    }
    return count;
}

}  // namespace causalkit
