#include "atlas/core/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "atlas/core/errors.hpp"

namespace atlas {

namespace {

constexpr std::array<std::string_view, 8> kTypeNames = {
    "Activation", "IncreaseAmount", "Phosphorylation",   "Inhibition",
    "DecreaseAmount", "Dephosphorylation", "Complex", "Association",
};

}  // namespace

std::string_view to_string(StatementType type) noexcept {
    return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<StatementType> statement_type_from_string(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) return static_cast<StatementType>(i);
    }
    return std::nullopt;
}

std::string_view to_string(Polarity polarity) noexcept {
    switch (polarity) {
        case Polarity::Positive: return "positive";
        case Polarity::Negative: return "negative";
        case Polarity::Unknown: break;
    }
    return "unknown";
}

std::optional<Polarity> polarity_from_string(std::string_view name) noexcept {
    if (name == "positive") return Polarity::Positive;
    if (name == "negative") return Polarity::Negative;
    if (name == "unknown") return Polarity::Unknown;
    return std::nullopt;
}

PolarityInfo polarity_of(StatementType type) noexcept {
    switch (type) {
        case StatementType::Activation:
        case StatementType::IncreaseAmount:
        case StatementType::Phosphorylation:
            return {Polarity::Positive, true};
        case StatementType::Inhibition:
        case StatementType::DecreaseAmount:
        case StatementType::Dephosphorylation:
            return {Polarity::Negative, true};
        case StatementType::Complex:
        case StatementType::Association:
            break;
    }
    return {Polarity::Unknown, false};
}

std::vector<std::string_view> split_category_path(std::string_view path) {
    std::vector<std::string_view> segments;
    std::size_t start = 0;
    while (true) {
        const auto slash = path.find('/', start);
        const auto segment = path.substr(start, slash == std::string_view::npos ? slash : slash - start);
        if (segment.empty()) {
            throw FormatError("malformed category path '" + std::string(path) + "': empty segment");
        }
        segments.push_back(segment);
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    if (segments.front() != "root") {
        throw FormatError("malformed category path '" + std::string(path) + "': must begin with root");
    }
    return segments;
}

std::size_t category_depth(std::string_view path) {
    return split_category_path(path).size() - 1;
}

std::string ancestor_at(std::string_view path, std::size_t depth) {
    const auto segments = split_category_path(path);
    if (depth + 1 >= segments.size()) return std::string(path);
    // The prefix ends right before the separator following segment `depth`.
    const auto& last = segments[depth];
    const auto end = static_cast<std::size_t>(last.data() - path.data()) + last.size();
    return std::string(path.substr(0, end));
}

const OntologyNode* OntologyNode::find(std::string_view path) const {
    if (path == id) return this;
    if (path.size() <= id.size() || path.substr(0, id.size()) != id || path[id.size()] != '/') {
        return nullptr;
    }
    for (const auto& child : children) {
        if (const auto* hit = child.find(path)) return hit;
    }
    return nullptr;
}

std::size_t OntologyNode::max_depth() const {
    std::size_t deepest = depth();
    for (const auto& child : children) deepest = std::max(deepest, child.max_depth());
    return deepest;
}

namespace {

struct TrieNode {
    std::map<std::string, TrieNode> children;  // keyed by full path, so map order == id order
    std::vector<std::string> members;
};

OntologyNode freeze(const std::string& path, TrieNode& node) {
    OntologyNode out;
    out.id = path;
    const auto slash = path.rfind('/');
    out.name = slash == std::string::npos ? path : path.substr(slash + 1);
    std::sort(node.members.begin(), node.members.end());
    out.member_agents = std::move(node.members);
    out.children.reserve(node.children.size());
    for (auto& [child_path, child] : node.children) out.children.push_back(freeze(child_path, child));
    return out;
}

TrieNode& insert_path(TrieNode& root, std::string_view path) {
    const auto segments = split_category_path(path);
    TrieNode* node = &root;
    std::string prefix = "root";
    for (std::size_t i = 1; i < segments.size(); ++i) {
        prefix += '/';
        prefix += segments[i];
        node = &node->children[prefix];
    }
    return *node;
}

}  // namespace

OntologyNode build_ontology(const std::vector<Agent>& agents,
                            const std::vector<std::string>& extra_categories) {
    TrieNode root;
    for (const auto& category : extra_categories) insert_path(root, category);
    for (const auto& agent : agents) insert_path(root, agent.category_path).members.push_back(agent.id);
    return freeze("root", root);
}

std::string edge_id(std::string_view subj, StatementType type, std::string_view obj) {
    std::string id;
    id.reserve(subj.size() + obj.size() + 20);
    id.append(subj).append("|").append(to_string(type)).append("|").append(obj);
    return id;
}

std::size_t AssembledGraph::agent_index(std::string_view agent_id) const {
    const auto it = agent_lookup_.find(agent_id);
    return it == agent_lookup_.end() ? npos : it->second;
}

std::size_t AssembledGraph::edge_index(std::string_view id_) const {
    const auto it = edge_lookup_.find(id_);
    return it == edge_lookup_.end() ? npos : it->second;
}

void AssembledGraph::reindex() {
    agent_lookup_.clear();
    edge_lookup_.clear();
    agent_lookup_.reserve(agents.size());
    edge_lookup_.reserve(edges.size());
    for (std::size_t i = 0; i < agents.size(); ++i) agent_lookup_.emplace(agents[i].id, i);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto& edge = edges[i];
        edge_lookup_.emplace(edge.id, i);
        edge.subj_index = agent_index(edge.subj);
        edge.obj_index = agent_index(edge.obj);
    }
}

std::string_view to_string(Severity severity) noexcept {
    return severity == Severity::Error ? "error" : "warning";
}

ValidationReport validate_dataset(const AssembledGraph& graph) {
    ValidationReport report;
    auto add = [&report](Severity severity, std::string code, std::string message, std::string subject) {
        report.push_back({severity, std::move(code), std::move(message), std::move(subject)});
    };

    std::map<std::string, std::size_t> agent_by_id;
    for (std::size_t i = 0; i < graph.agents.size(); ++i) {
        const auto& agent = graph.agents[i];
        if (agent.id.empty()) {
            add(Severity::Error, "empty-agent-id", "agent #" + std::to_string(i) + " has an empty id", "");
            continue;
        }
        if (!agent_by_id.emplace(agent.id, i).second) {
            add(Severity::Error, "duplicate-agent", "agent id appears more than once", agent.id);
        }
        if (i > 0 && !(graph.agents[i - 1].id < agent.id)) {
            add(Severity::Error, "agents-unsorted", "agents are not sorted by id", agent.id);
        }
        try {
            split_category_path(agent.category_path);
        } catch (const FormatError& e) {
            add(Severity::Error, "bad-category", e.what(), agent.id);
            continue;
        }
        const auto* node = graph.ontology.find(agent.category_path);
        if (node == nullptr) {
            add(Severity::Error, "unresolved-category",
                "category '" + agent.category_path + "' is not in the ontology", agent.id);
        } else {
            if (!node->is_leaf()) {
                add(Severity::Warning, "agent-not-at-leaf",
                    "category '" + agent.category_path + "' has subcategories", agent.id);
            }
            if (!std::binary_search(node->member_agents.begin(), node->member_agents.end(), agent.id)) {
                add(Severity::Error, "ontology-membership", "agent missing from its category's members",
                    agent.id);
            }
        }
    }

    if (graph.adjacency.size() != graph.agents.size()) {
        add(Severity::Error, "adjacency-size",
            "adjacency has " + std::to_string(graph.adjacency.size()) + " entries for " +
                std::to_string(graph.agents.size()) + " agents",
            graph.id);
    }

    std::map<std::string, std::size_t> edge_by_id;
    std::set<std::tuple<std::string, StatementType, std::string>> triples;
    // (node, edge, outgoing?) references implied by edges
    std::set<std::tuple<std::size_t, std::size_t, bool>> expected_refs;
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        const auto& edge = graph.edges[i];
        if (!edge_by_id.emplace(edge.id, i).second) {
            add(Severity::Error, "duplicate-edge-id", "edge id appears more than once", edge.id);
        }
        if (i > 0 && !(graph.edges[i - 1].id < edge.id)) {
            add(Severity::Error, "edges-unsorted", "edges are not sorted by id", edge.id);
        }
        if (edge.id != edge_id(edge.subj, edge.type, edge.obj)) {
            add(Severity::Error, "edge-id-mismatch", "edge id does not match subj|type|obj", edge.id);
        }
        if (!triples.emplace(edge.subj, edge.type, edge.obj).second) {
            add(Severity::Error, "duplicate-triple", "more than one edge for (subj, type, obj)", edge.id);
        }
        const auto subj = agent_by_id.find(edge.subj);
        const auto obj = agent_by_id.find(edge.obj);
        if (subj == agent_by_id.end()) {
            add(Severity::Error, "dangling-endpoint", "edge " + edge.id + " references missing subject",
                edge.subj);
        }
        if (obj == agent_by_id.end()) {
            add(Severity::Error, "dangling-endpoint", "edge " + edge.id + " references missing object",
                edge.obj);
        }
        if (edge.subj == edge.obj) add(Severity::Error, "self-loop", "edge connects an agent to itself", edge.id);
        const auto info = polarity_of(edge.type);
        if (info.polarity != edge.polarity || info.directed != edge.directed) {
            add(Severity::Error, "polarity-mismatch", "polarity/direction disagree with statement type", edge.id);
        }
        if (!(edge.belief >= 0.0 && edge.belief <= 1.0)) {
            add(Severity::Error, "belief-range", "belief outside [0, 1]", edge.id);
        }
        if (edge.evidence.empty()) add(Severity::Error, "empty-evidence", "edge has no evidence", edge.id);
        if (edge.evidence_count != edge.evidence.size()) {
            add(Severity::Error, "evidence-count",
                "evidence_count " + std::to_string(edge.evidence_count) + " != " +
                    std::to_string(edge.evidence.size()) + " evidence items",
                edge.id);
        }
        std::set<std::string> dois;
        for (const auto& ev : edge.evidence) {
            if (ev.text.empty()) add(Severity::Error, "empty-evidence-text", "evidence text is empty", edge.id);
            if (!ev.doi.empty()) dois.insert(ev.doi);
        }
        if (!std::equal(dois.begin(), dois.end(), edge.dois.begin(), edge.dois.end())) {
            add(Severity::Error, "doi-set", "doi set differs from the evidence DOIs", edge.id);
        }
        if (subj != agent_by_id.end()) expected_refs.emplace(subj->second, i, true);
        if (obj != agent_by_id.end()) expected_refs.emplace(obj->second, i, false);
    }

    std::set<std::tuple<std::size_t, std::size_t, bool>> actual_refs;
    for (std::size_t node = 0; node < graph.adjacency.size(); ++node) {
        const auto& adj = graph.adjacency[node];
        const std::string subject = node < graph.agents.size() ? graph.agents[node].id : std::to_string(node);
        for (const bool outgoing : {true, false}) {
            const auto& list = outgoing ? adj.outgoing : adj.incoming;
            for (std::size_t k = 0; k < list.size(); ++k) {
                if (list[k] >= graph.edges.size()) {
                    add(Severity::Error, "adjacency-edge", "adjacency references a missing edge", subject);
                    continue;
                }
                if (k > 0 && list[k - 1] >= list[k]) {
                    add(Severity::Error, "adjacency-order", "adjacency list is not strictly ascending", subject);
                }
                actual_refs.emplace(node, list[k], outgoing);
            }
        }
    }
    for (const auto& ref : expected_refs) {
        if (!actual_refs.contains(ref)) {
            const auto& [node, edge, outgoing] = ref;
            add(Severity::Error, "adjacency-missing",
                std::string(outgoing ? "outgoing" : "incoming") + " list lacks edge " + graph.edges[edge].id,
                graph.agents[node].id);
        }
    }
    for (const auto& ref : actual_refs) {
        if (!expected_refs.contains(ref)) {
            const auto& [node, edge, outgoing] = ref;
            add(Severity::Error, "adjacency-extra",
                std::string(outgoing ? "outgoing" : "incoming") + " list holds unrelated edge " +
                    graph.edges[edge].id,
                node < graph.agents.size() ? graph.agents[node].id : std::to_string(node));
        }
    }

    // Every ontology member must be a real agent grounded at that node.
    auto check_members = [&](const auto& self, const OntologyNode& node) -> void {
        for (const auto& member : node.member_agents) {
            const auto it = agent_by_id.find(member);
            if (it == agent_by_id.end() || graph.agents[it->second].category_path != node.id) {
                add(Severity::Error, "ontology-membership", "category " + node.id + " lists a foreign agent",
                    member);
            }
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            if (i > 0 && !(node.children[i - 1].id < node.children[i].id)) {
                add(Severity::Error, "ontology-order", "children are not sorted by id", node.id);
            }
            self(self, node.children[i]);
        }
    };
    if (graph.ontology.id != "root") {
        add(Severity::Error, "ontology-root", "ontology root must be 'root'", graph.ontology.id);
    } else {
        check_members(check_members, graph.ontology);
    }

    std::sort(report.begin(), report.end(), [](const ValidationIssue& a, const ValidationIssue& b) {
        return std::tie(a.severity, a.subject, a.code, a.message) <
               std::tie(b.severity, b.subject, b.code, b.message);
    });
    return report;
}

}  // namespace atlas
