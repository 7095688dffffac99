#include "causalkit/scm.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "causalkit/errors.hpp"
#include "causalkit/rng.hpp"

namespace causalkit {

namespace {

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    const auto alpha = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    const auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    if (!alpha(name.front())) return false;
    return std::all_of(name.begin() + 1, name.end(), alnum);
}

Dag dag_from_assignments(const std::vector<NodeAssignment>& assignments) {
    std::vector<std::string> nodes;
    nodes.reserve(assignments.size());
    std::set<std::string> declared;
    for (const auto& a : assignments) {
        nodes.push_back(a.node);
        if (!declared.insert(a.node).second)
            throw DuplicateError("node assigned twice: " + a.node);
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& a : assignments) {
        for (const auto& [parent, coef] : a.parent_coefficients) {
            (void)coef;
            if (!declared.contains(parent))
                throw InconsistentParentsError("node " + a.node + " lists undeclared parent " +
                                               parent);
            edges.emplace_back(parent, a.node);
        }
    }
    return Dag(std::move(nodes), edges);
}

}  // namespace

Scm::Scm(std::vector<NodeAssignment> assignments)
    : assignments_(std::move(assignments)), dag_(dag_from_assignments(assignments_)) {
    for (const auto& a : assignments_) {
        if (!(a.noise_std >= 0.0))
            throw SchemaError("node " + a.node + ": noise_std must be >= 0");
    }
}

const NodeAssignment& Scm::assignment(const std::string& node) const {
    for (const auto& a : assignments_)
        if (a.node == node) return a;
    throw UnknownNodeError("unknown node: " + node);
}

bool Scm::operator==(const Scm& other) const {
    if (assignments_.size() != other.assignments_.size()) return false;
    for (std::size_t i = 0; i < assignments_.size(); ++i) {
        const auto& a = assignments_[i];
        const auto& b = other.assignments_[i];
        if (a.node != b.node || a.noise_std != b.noise_std ||
            a.parent_coefficients != b.parent_coefficients)
            return false;
    }
    return true;
}

Scm parse_scm(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("SCM spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("SCM spec must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "nodes") throw SchemaError("unknown top-level key: " + key);
    }
    if (!doc.contains("nodes") || !doc["nodes"].is_array())
        throw SchemaError("SCM spec requires a \"nodes\" array");
    const auto& nodes = doc["nodes"];
    if (nodes.empty()) throw SchemaError("\"nodes\" must not be empty");

    std::vector<NodeAssignment> assignments;
    assignments.reserve(nodes.size());
    for (const auto& entry : nodes) {
        if (!entry.is_object()) throw SchemaError("node entries must be objects");
        for (const auto& [key, value] : entry.items()) {
            (void)value;
            if (key != "name" && key != "parents" && key != "noise_std")
                throw SchemaError("unknown node key: " + key);
        }
        if (!entry.contains("name") || !entry["name"].is_string())
            throw SchemaError("node entry requires a string \"name\"");
        if (!entry.contains("parents") || !entry["parents"].is_object())
            throw SchemaError("node entry requires a \"parents\" object");
        if (!entry.contains("noise_std") || !entry["noise_std"].is_number())
            throw SchemaError("node entry requires a numeric \"noise_std\"");
        NodeAssignment a;
        a.node = entry["name"].get<std::string>();
        if (!valid_name(a.node)) throw SchemaError("invalid node name: " + a.node);
        for (const auto& [parent, coef] : entry["parents"].items()) {
            if (!valid_name(parent)) throw SchemaError("invalid parent name: " + parent);
            if (!coef.is_number())
                throw SchemaError("coefficient of parent " + parent + " must be a number");
            a.parent_coefficients[parent] = coef.get<double>();
        }
        a.noise_std = entry["noise_std"].get<double>();
        if (!(a.noise_std >= 0.0))
            throw SchemaError("node " + a.node + ": noise_std must be >= 0");
        assignments.push_back(std::move(a));
    }
    return Scm(std::move(assignments));
}

std::string serialize_scm(const Scm& scm) {
    nlohmann::json doc;
    auto& nodes = doc["nodes"];
    nodes = nlohmann::json::array();
    for (const auto& a : scm.assignments()) {
        nlohmann::json entry;
        entry["name"] = a.node;
        entry["noise_std"] = a.noise_std;
        entry["parents"] = nlohmann::json::object();
        for (const auto& [parent, coef] : a.parent_coefficients)
            entry["parents"][parent] = coef;
        nodes.push_back(std::move(entry));
    }
    return doc.dump() + "\n";
}

Scm load_scm_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open SCM spec: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scm(buffer.str());
}

Dataset sample(const Scm& scm, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("sample: n must be >= 1");
    const Dag& dag = scm.dag();
    std::vector<std::vector<double>> cols(dag.size());
    for (const int node : dag.topological_order()) {
        const auto& a = scm.assignments()[static_cast<std::size_t>(node)];
        Rng rng(derive_seed(seed, std::string_view(a.node)));
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = a.noise_std * rng.next_gaussian();
        for (const auto& [parent, coef] : a.parent_coefficients) {
            const auto& pv = cols[static_cast<std::size_t>(dag.index_of(parent))];
            for (std::size_t i = 0; i < n; ++i) v[i] += coef * pv[i];
        }
        cols[static_cast<std::size_t>(node)] = std::move(v);
    }
    return Dataset(dag.nodes(), std::move(cols));
}

double total_causal_effect(const Scm& scm, const std::string& cause, const std::string& effect) {
    const Dag& dag = scm.dag();
    const int c = dag.index_of(cause);
    const int e = dag.index_of(effect);
    std::vector<double> eff(dag.size(), 0.0);
    eff[static_cast<std::size_t>(c)] = 1.0;
    for (const int node : dag.topological_order()) {
        if (node == c) continue;
        const auto& a = scm.assignments()[static_cast<std::size_t>(node)];
        double sum = 0.0;
        for (const auto& [parent, coef] : a.parent_coefficients)
            sum += coef * eff[static_cast<std::size_t>(dag.index_of(parent))];
        eff[static_cast<std::size_t>(node)] = sum;
    }
    return eff[static_cast<std::size_t>(e)];
}

Scm builtin_scm(BuiltinScm which) {
    std::vector<NodeAssignment> assignments;
    if (which == BuiltinScm::Simple) {
        const std::vector<std::string> predictors{"X", "D", "A", "K", "C", "F", "G", "H"};
        for (const auto& p : predictors) assignments.push_back({p, {}, 1.0});
        NodeAssignment y;
        y.node = "Y";
        for (const auto& p : predictors) y.parent_coefficients[p] = 1.0;
        y.noise_std = 1.0;
        assignments.push_back(std::move(y));
    } else {
        assignments.push_back({"C", {}, 1.0});
        assignments.push_back({"A", {}, 0.8});
        assignments.push_back({"K", {{"A", 1.0}}, 0.1});
        assignments.push_back({"X", {{"C", 1.0}, {"A", -2.0}}, 0.2});
        assignments.push_back({"F", {{"X", 3.0}}, 0.8});
        assignments.push_back({"D", {{"X", -2.0}}, 0.5});
        assignments.push_back({"G", {{"D", 1.0}}, 0.5});
        assignments.push_back({"Y", {{"K", 2.0}, {"D", -1.0}}, 0.2});
        assignments.push_back({"H", {{"Y", 0.5}}, 0.1});
    }
    return Scm(std::move(assignments));
}

}  // namespace causalkit
