#include "atlas/query/chain.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>

#include "atlas/core/model.hpp"

namespace atlas::query {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<CompareOp, std::string_view>, 7> kOps = {{
    {CompareOp::Eq, "="},
    {CompareOp::Ne, "!="},
    {CompareOp::Lt, "<"},
    {CompareOp::Le, "<="},
    {CompareOp::Gt, ">"},
    {CompareOp::Ge, ">="},
    {CompareOp::Contains, "contains"},
}};

constexpr std::array<std::pair<NodeField, std::string_view>, 6> kNodeFields = {{
    {NodeField::Id, "id"},
    {NodeField::Name, "name"},
    {NodeField::Category, "category"},
    {NodeField::Degree, "degree"},
    {NodeField::InDegree, "in_degree"},
    {NodeField::OutDegree, "out_degree"},
}};

constexpr std::array<std::pair<EdgeField, std::string_view>, 5> kEdgeFields = {{
    {EdgeField::Type, "type"},
    {EdgeField::Polarity, "polarity"},
    {EdgeField::Curated, "curated"},
    {EdgeField::EvidenceCount, "evidence_count"},
    {EdgeField::Belief, "belief"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view name) {
    for (const auto& [e, n] : table) {
        if (n == name) return e;
    }
    return std::nullopt;
}

enum class ValueKind { Number, String, Boolean };

ValueKind kind_of(NodeField field) {
    switch (field) {
        case NodeField::Id:
        case NodeField::Name:
        case NodeField::Category: return ValueKind::String;
        default: return ValueKind::Number;
    }
}

ValueKind kind_of(EdgeField field) {
    switch (field) {
        case EdgeField::Type:
        case EdgeField::Polarity: return ValueKind::String;
        case EdgeField::Curated: return ValueKind::Boolean;
        default: return ValueKind::Number;
    }
}

std::string_view kind_name(ValueKind kind) {
    switch (kind) {
        case ValueKind::Number: return "numeric";
        case ValueKind::String: return "string";
        case ValueKind::Boolean: break;
    }
    return "boolean";
}

bool op_allowed(ValueKind kind, CompareOp op) {
    if (op == CompareOp::Eq || op == CompareOp::Ne) return true;
    if (op == CompareOp::Contains) return kind == ValueKind::String;
    return kind == ValueKind::Number;
}

std::string string_member(const json& obj, const char* key, std::size_t index) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw QueryError(index, "missing-field", std::string("'") + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::vector<std::string> id_list(const json& obj, const char* key, std::size_t index) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_array() || it->empty()) {
        throw QueryError(index, "missing-field", std::string("'") + key + "' must be a nonempty array");
    }
    std::vector<std::string> out;
    for (const auto& item : *it) {
        if (!item.is_string()) throw QueryError(index, "type-mismatch", std::string("'") + key + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::size_t bounded_int(const json& obj, const char* key, std::size_t fallback, std::size_t lo, std::size_t hi,
                        std::size_t index) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) throw QueryError(index, "type-mismatch", std::string("'") + key + "' must be an integer");
    const auto v = it->get<long long>();
    if (v < static_cast<long long>(lo) || v > static_cast<long long>(hi)) {
        throw QueryError(index, "out-of-range",
                         std::string("'") + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<std::size_t>(v);
}

template <typename Field, std::size_t N>
std::tuple<Field, CompareOp, FacetValue> attribute(const json& obj, const std::array<std::pair<Field, std::string_view>, N>& fields,
                                                   std::size_t index) {
    const auto field_name = string_member(obj, "field", index);
    const auto field = lookup(fields, field_name);
    if (!field) throw QueryError(index, "unknown-field", "unknown field '" + field_name + "'");
    const auto op_name = string_member(obj, "op", index);
    const auto op = lookup(kOps, op_name);
    if (!op) throw QueryError(index, "unknown-op", "unknown op '" + op_name + "'");
    const auto kind = kind_of(*field);
    if (!op_allowed(kind, *op)) {
        throw QueryError(index, "type-mismatch",
                         "op '" + op_name + "' does not apply to " + std::string(kind_name(kind)) + " field '" +
                             field_name + "'");
    }
    const auto it = obj.find("value");
    if (it == obj.end()) throw QueryError(index, "missing-field", "'value' is required");
    FacetValue value;
    if (kind == ValueKind::Number && it->is_number()) {
        value = it->get<double>();
    } else if (kind == ValueKind::String && it->is_string()) {
        value = it->get<std::string>();
    } else if (kind == ValueKind::Boolean && it->is_boolean()) {
        value = it->get<bool>();
    } else {
        throw QueryError(index, "type-mismatch",
                         "field '" + field_name + "' needs a " + std::string(kind_name(kind)) + " value");
    }
    return {*field, *op, std::move(value)};
}

json value_json(const FacetValue& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

}  // namespace

std::string_view to_string(CompareOp op) noexcept { return name_of(kOps, op); }
std::string_view to_string(NodeField field) noexcept { return name_of(kNodeFields, field); }
std::string_view to_string(EdgeField field) noexcept { return name_of(kEdgeFields, field); }

std::string_view facet_kind(const Facet& facet) noexcept {
    switch (facet.index()) {
        case 0: return "node";
        case 1: return "edge";
        case 2: return "doc";
        default: return "path";
    }
}

QueryError::QueryError(std::size_t facet_index, std::string code, const std::string& detail)
    : Error((facet_index == npos ? std::string("query") : "facet " + std::to_string(facet_index)) + ": " + detail),
      facet_index_(facet_index),
      code_(std::move(code)) {}

QueryChain parse_query(std::string_view text) {
    json document;
    try {
        document = json::parse(text);
    } catch (const json::parse_error& e) {
        throw QueryError(npos, "malformed-json", e.what());
    }
    return parse_query(document);
}

QueryChain parse_query(const json& document) {
    if (!document.is_object()) throw QueryError(npos, "malformed-query", "query must be a JSON object");
    const auto it = document.find("chain");
    if (it == document.end() || !it->is_array()) throw QueryError(npos, "malformed-query", "'chain' must be an array");

    QueryChain chain;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& obj = (*it)[i];
        if (!obj.is_object()) throw QueryError(i, "malformed-facet", "facet must be an object");
        const auto kind = string_member(obj, "facet", i);
        if (kind == "node") {
            auto [field, op, value] = attribute(obj, kNodeFields, i);
            chain.facets.emplace_back(NodeFacet{field, op, std::move(value)});
        } else if (kind == "edge") {
            auto [field, op, value] = attribute(obj, kEdgeFields, i);
            if (op != CompareOp::Contains) {
                if (field == EdgeField::Type && !statement_type_from_string(std::get<std::string>(value))) {
                    throw QueryError(i, "unknown-value", "unknown statement type '" + std::get<std::string>(value) + "'");
                }
                if (field == EdgeField::Polarity && !polarity_from_string(std::get<std::string>(value))) {
                    throw QueryError(i, "unknown-value", "unknown polarity '" + std::get<std::string>(value) + "'");
                }
            }
            chain.facets.emplace_back(EdgeFacet{field, op, std::move(value)});
        } else if (kind == "doc") {
            chain.facets.emplace_back(DocFacet{id_list(obj, "dois", i)});
        } else if (kind == "path") {
            PathFacet facet;
            facet.sources = id_list(obj, "sources", i);
            facet.targets = id_list(obj, "targets", i);
            facet.max_len = bounded_int(obj, "max_len", kDefaultMaxPathLength, 1, kMaxPathLength, i);
            facet.cap = bounded_int(obj, "cap", kDefaultPathCap, 1, std::numeric_limits<std::uint32_t>::max(), i);
            chain.facets.emplace_back(std::move(facet));
        } else {
            throw QueryError(i, "unknown-facet", "unknown facet '" + kind + "'");
        }
    }
    return chain;
}

json to_json(const QueryChain& chain) {
    json facets = json::array();
    for (const auto& facet : chain.facets) {
        std::visit(
            [&](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, NodeFacet> || std::is_same_v<T, EdgeFacet>) {
                    facets.push_back({{"facet", std::is_same_v<T, NodeFacet> ? "node" : "edge"},
                                      {"field", to_string(f.field)},
                                      {"op", to_string(f.op)},
                                      {"value", value_json(f.value)}});
                } else if constexpr (std::is_same_v<T, DocFacet>) {
                    facets.push_back({{"facet", "doc"}, {"dois", f.dois}});
                } else {
                    facets.push_back({{"facet", "path"},
                                      {"sources", f.sources},
                                      {"targets", f.targets},
                                      {"max_len", f.max_len},
                                      {"cap", f.cap}});
                }
            },
            facet);
    }
    return {{"chain", facets}};
}

std::string serialize_query(const QueryChain& chain) { return to_json(chain).dump(); }

}  // namespace atlas::query
