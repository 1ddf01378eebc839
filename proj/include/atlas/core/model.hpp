#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace atlas {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class StatementType : std::uint8_t {
    Activation,
    IncreaseAmount,
    Phosphorylation,
    Inhibition,
    DecreaseAmount,
    Dephosphorylation,
    Complex,
    Association,
};

inline constexpr std::array<StatementType, 8> kAllStatementTypes = {
    StatementType::Activation,     StatementType::IncreaseAmount, StatementType::Phosphorylation,
    StatementType::Inhibition,     StatementType::DecreaseAmount, StatementType::Dephosphorylation,
    StatementType::Complex,        StatementType::Association,
};

std::string_view to_string(StatementType type) noexcept;
std::optional<StatementType> statement_type_from_string(std::string_view name) noexcept;

enum class Polarity : std::uint8_t { Positive, Negative, Unknown };

std::string_view to_string(Polarity polarity) noexcept;
std::optional<Polarity> polarity_from_string(std::string_view name) noexcept;

struct PolarityInfo {
    Polarity polarity;
    bool directed;

    friend bool operator==(const PolarityInfo&, const PolarityInfo&) = default;
};

/// Fixed regulation table: activating types are positive, inhibiting types are
/// negative, binding types are undirected with unknown sign.
PolarityInfo polarity_of(StatementType type) noexcept;

struct Agent {
    std::string id;
    std::string name;
    std::string category_path;
    std::string description;

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct Evidence {
    std::string text;
    std::string doi;
    std::string source;

    friend bool operator==(const Evidence&, const Evidence&) = default;
    friend auto operator<=>(const Evidence&, const Evidence&) = default;
};

struct CausalStatement {
    std::string id;
    StatementType type = StatementType::Activation;
    std::string subj;
    std::string obj;
    double belief = 1.0;
    bool curated = false;
    std::vector<Evidence> evidence;

    friend bool operator==(const CausalStatement&, const CausalStatement&) = default;
};

/// Splits a slash-delimited category path. Throws FormatError on empty segments
/// or when the first segment is not "root".
std::vector<std::string_view> split_category_path(std::string_view path);

/// Number of segments in a well-formed path minus one ("root" has depth 0).
std::size_t category_depth(std::string_view path);

/// Prefix of `path` holding `depth + 1` segments, clamped to the full path.
std::string ancestor_at(std::string_view path, std::size_t depth);

struct OntologyNode {
    std::string id;    // full path
    std::string name;  // last segment
    std::vector<OntologyNode> children;  // sorted by id
    std::vector<std::string> member_agents;

    std::size_t depth() const { return category_depth(id); }
    bool is_leaf() const noexcept { return children.empty(); }
    const OntologyNode* find(std::string_view path) const;
    std::size_t max_depth() const;
};

/// Builds the category tree as the union of the agents' paths plus any extra
/// (possibly empty) categories. Agents are attached to the node matching their path.
OntologyNode build_ontology(const std::vector<Agent>& agents,
                            const std::vector<std::string>& extra_categories = {});

struct Edge {
    std::string id;  // "subj|type|obj"
    std::string subj;
    std::string obj;
    StatementType type = StatementType::Activation;
    Polarity polarity = Polarity::Unknown;
    bool directed = true;
    bool curated = false;
    double belief = 0.0;
    std::size_t evidence_count = 0;
    std::vector<Evidence> evidence;
    std::vector<std::string> dois;           // sorted, unique
    std::vector<std::string> statement_ids;  // constituents, input order

    std::size_t subj_index = npos;
    std::size_t obj_index = npos;
};

std::string edge_id(std::string_view subj, StatementType type, std::string_view obj);

struct Adjacency {
    std::vector<std::size_t> incoming;  // edge indices, ascending
    std::vector<std::size_t> outgoing;
};

/// Deduplicated multidigraph. Agents are kept sorted by id and edges by edge id,
/// so vector indices are stable handles for the query and layout code.
struct AssembledGraph {
    std::string id;
    std::vector<Agent> agents;
    std::vector<Edge> edges;
    std::vector<Adjacency> adjacency;  // parallel to agents
    OntologyNode ontology;

    std::size_t agent_index(std::string_view agent_id) const;  // npos if absent
    std::size_t edge_index(std::string_view edge_id) const;    // npos if absent

    std::size_t in_degree(std::size_t node) const { return adjacency[node].incoming.size(); }
    std::size_t out_degree(std::size_t node) const { return adjacency[node].outgoing.size(); }
    std::size_t degree(std::size_t node) const { return in_degree(node) + out_degree(node); }

    /// Rebuilds the id lookups and the cached endpoint indices from the id strings.
    /// Leaves endpoint indices at npos for dangling references.
    void reindex();

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> agent_lookup_;
    std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> edge_lookup_;
};

enum class Severity : std::uint8_t { Error, Warning };

std::string_view to_string(Severity severity) noexcept;

struct ValidationIssue {
    Severity severity;
    std::string code;
    std::string message;
    std::string subject;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Checks every AssembledGraph invariant. Empty iff the graph is well formed;
/// sorted by (severity, subject, code, message).
ValidationReport validate_dataset(const AssembledGraph& graph);

}  // namespace atlas
