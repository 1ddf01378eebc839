#include "atlas/server/api.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <optional>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "atlas/core/errors.hpp"
#include "atlas/layout/flow.hpp"
#include "atlas/layout/hyper_route.hpp"
#include "atlas/query/chain.hpp"
#include "atlas/query/engine.hpp"

namespace atlas::server {

using nlohmann::json;

namespace {

constexpr std::size_t kEvidenceNeighbors = 5;
constexpr std::size_t kDefaultPageSize = 50;
constexpr std::size_t kDefaultNeighbors = 10;

/// Client mistake carrying a JSON detail object.
struct BadRequest {
    int status;
    json body;
};

[[noreturn]] void fail(int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    throw BadRequest{status, std::move(extra)};
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool consume_prefix(std::string_view& text, std::string_view prefix) {
    if (!text.starts_with(prefix)) return false;
    text.remove_prefix(prefix.size());
    return true;
}

bool consume_suffix(std::string_view& text, std::string_view suffix) {
    if (!text.ends_with(suffix) || text.size() == suffix.size()) return false;
    text.remove_suffix(suffix.size());
    return true;
}

class Params {
public:
    explicit Params(const std::map<std::string, std::string>& query) : query_(query) {}

    std::optional<std::string> text(const std::string& name) const {
        const auto it = query_.find(name);
        if (it == query_.end() || it->second.empty()) return std::nullopt;
        return it->second;
    }

    template <typename Int>
    std::optional<Int> integer(const std::string& name, Int lo, Int hi) const {
        const auto raw = text(name);
        if (!raw) return std::nullopt;
        Int value{};
        const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
        if (ec != std::errc() || ptr != raw->data() + raw->size() || value < lo || value > hi) {
            fail(400, "parameter '" + name + "' must be an integer in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]",
                 {{"field", name}});
        }
        return value;
    }

    std::optional<bool> boolean(const std::string& name) const {
        const auto raw = text(name);
        if (!raw) return std::nullopt;
        if (*raw == "true" || *raw == "1") return true;
        if (*raw == "false" || *raw == "0") return false;
        fail(400, "parameter '" + name + "' must be true or false", {{"field", name}});
    }

private:
    const std::map<std::string, std::string>& query_;
};

json agent_json(const AssembledGraph& graph, std::size_t index) {
    const auto& a = graph.agents[index];
    return {{"id", a.id},
            {"name", a.name},
            {"category", a.category_path},
            {"description", a.description},
            {"in_degree", graph.in_degree(index)},
            {"out_degree", graph.out_degree(index)}};
}

json edge_json(const Edge& e) {
    return {{"id", e.id},
            {"subj", e.subj},
            {"obj", e.obj},
            {"type", to_string(e.type)},
            {"polarity", to_string(e.polarity)},
            {"directed", e.directed},
            {"curated", e.curated},
            {"belief", e.belief},
            {"evidence_count", e.evidence_count},
            {"dois", e.dois}};
}

json query_error_json(const query::QueryError& e) {
    json out{{"error", e.what()}, {"code", e.code()}};
    out["facet"] = e.facet_index() == npos ? json(nullptr) : json(e.facet_index());
    return out;
}

class Router {
public:
    Router(const Dataset& dataset, const Request& request) : data_(dataset), req_(request), params_(request.query) {}

    json route() {
        std::string_view path = req_.path;
        if (!consume_prefix(path, "/api/")) not_found();
        if (path == "graphs") return get(&Router::graphs);
        if (consume_prefix(path, "graphs/")) return graph_route(path);
        if (consume_prefix(path, "corpus/")) return corpus_route(path);
        not_found();
    }

private:
    [[noreturn]] void not_found() const { fail(404, "no route for " + req_.method + " " + req_.path); }

    void require(std::string_view method) const {
        if (req_.method != method) not_found();
    }

    json get(json (Router::*handler)()) {
        require("GET");
        return (this->*handler)();
    }

    json graphs() {
        json out = json::array();
        for (const auto& g : data_.graphs) {
            out.push_back({{"id", g.entry.id},
                           {"name", g.entry.name},
                           {"nodes", g.graph.agents.size()},
                           {"edges", g.graph.edges.size()},
                           {"maxDepth", g.graph.ontology.max_depth()}});
        }
        return out;
    }

    json graph_route(std::string_view rest) {
        const auto slash = rest.find('/');
        const auto id = rest.substr(0, slash);
        const GraphData* g = data_.graph(id);
        if (!g) fail(404, "unknown graph '" + std::string(id) + "'");
        if (slash == std::string_view::npos) not_found();
        rest.remove_prefix(slash + 1);

        if (rest == "overview") {
            require("GET");
            return overview(*g);
        }
        if (rest == "query") {
            require("POST");
            return run_query(*g);
        }
        if (rest == "layout") {
            require("POST");
            return flow(*g);
        }
        if (consume_prefix(rest, "nodes/") && !rest.empty()) {
            require("GET");
            return node(*g, rest);
        }
        if (consume_prefix(rest, "edges/") && consume_suffix(rest, "/evidence")) {
            require("GET");
            return evidence(*g, rest);
        }
        not_found();
    }

    json overview(const GraphData& g) {
        const std::size_t max_depth = g.graph.ontology.max_depth();
        const auto depth = params_.integer<std::size_t>("depth", 0, 64).value_or(1);
        const std::size_t level = std::min(depth, g.bundles.empty() ? 0 : g.bundles.size() - 1);
        static const std::vector<ingest::HyperEdge> none;
        auto out = layout::overview_json(g.pack, g.bundles.empty() ? none : g.bundles[level], depth);
        out["depth"] = depth;
        out["maxDepth"] = max_depth;
        out["lodThresholdPx"] = data_.options.lod_threshold_px;
        return out;
    }

    json run_query(const GraphData& g) {
        try {
            const auto chain = query::parse_query(std::string_view(req_.body));
            return query::result_json(g.graph, query::run_chain(g.graph, chain));
        } catch (const query::QueryError& e) {
            throw BadRequest{400, query_error_json(e)};
        }
    }

    json flow(const GraphData& g) {
        json body;
        try {
            body = json::parse(req_.body);
        } catch (const json::parse_error& e) {
            fail(400, std::string("malformed JSON: ") + e.what());
        }
        auto ids = [&](const char* key) {
            std::vector<std::string> out;
            if (!body.is_object()) fail(400, "layout body must be an object");
            const auto it = body.find(key);
            if (it == body.end()) return out;
            if (!it->is_array()) fail(400, std::string("'") + key + "' must be an array", {{"field", key}});
            for (const auto& v : *it) {
                if (!v.is_string()) fail(400, std::string("'") + key + "' must hold strings", {{"field", key}});
                out.push_back(v.get<std::string>());
            }
            return out;
        };
        const auto nodes = ids("nodes");
        const auto edges = ids("edges");
        if (nodes.empty() && edges.empty()) fail(400, "layout needs at least one node or edge");
        try {
            return layout::flow_layout_json(layout::flow_layout(layout::flow_subgraph(g.graph, nodes, edges)));
        } catch (const UnknownEntityError& e) {
            fail(400, e.what(), {{"id", e.id()}});
        }
    }

    json node(const GraphData& g, std::string_view node_id) {
        const auto index = g.graph.agent_index(node_id);
        if (index == npos) fail(404, "unknown node '" + std::string(node_id) + "'");
        const auto dir = params_.text("direction").value_or("out");
        if (dir != "in" && dir != "out") fail(400, "direction must be 'in' or 'out'", {{"field", "direction"}});
        std::vector<std::size_t> current;
        if (const auto sub = params_.text("subgraph")) {
            for (auto id : split(*sub, ',')) {
                if (id.empty()) continue;
                const auto e = g.graph.edge_index(id);
                if (e == npos) fail(400, "unknown edge '" + std::string(id) + "'", {{"field", "subgraph"}});
                current.push_back(e);
            }
        }
        const auto suggestions = query::suggest_neighbors(g.graph, current, std::string(node_id),
                                                          dir == "in" ? query::Direction::Incoming
                                                                      : query::Direction::Outgoing);
        return {{"node", agent_json(g.graph, index)},
                {"direction", dir},
                {"suggestions", query::suggestions_json(g.graph, suggestions)}};
    }

    json evidence(const GraphData& g, std::string_view edge_id) {
        const auto index = g.graph.edge_index(edge_id);
        if (index == npos) fail(404, "unknown edge '" + std::string(edge_id) + "'");
        const auto& edge = g.graph.edges[index];
        const auto& corpus = data_.corpus;
        json items = json::array();
        for (const auto& ev : edge.evidence) {
            json item{{"text", ev.text}, {"doi", ev.doi}, {"source", ev.source}};
            const auto row = ev.doi.empty() ? npos : corpus.row_of(ev.doi);
            item["document"] = row == npos ? json(nullptr) : knowledge::document_json(corpus.documents()[row]);
            json neighbors = json::array();
            if (row != npos && corpus.size() > 1 &&
                corpus.embeddings().row(static_cast<Eigen::Index>(row)).squaredNorm() > 0) {
                for (const auto& n : corpus.semantic_neighbors(ev.doi, std::min(kEvidenceNeighbors, corpus.size() - 1))) {
                    neighbors.push_back(corpus.documents()[n.row].doi);
                }
            }
            item["neighbors"] = std::move(neighbors);
            items.push_back(std::move(item));
        }
        return {{"edge", edge_json(edge)}, {"evidence", std::move(items)}};
    }

    json corpus_route(std::string_view rest) {
        require("GET");
        if (rest == "documents") return search();
        if (rest == "clusters") return clusters();
        if (consume_prefix(rest, "documents/") && !rest.empty()) {
            if (consume_suffix(rest, "/neighbors")) return neighbors(rest);
            if (consume_suffix(rest, "/graphs")) return links(rest);
            return document(rest);
        }
        not_found();
    }

    json search() {
        knowledge::SearchFacets f;
        f.text = params_.text("text");
        f.author = params_.text("author");
        f.publisher = params_.text("publisher");
        f.entity = params_.text("entity");
        f.year_min = params_.integer<int>("year_min", -100000, 100000);
        f.year_max = params_.integer<int>("year_max", -100000, 100000);
        f.has_figures = params_.boolean("has_figures");
        f.has_tables = params_.boolean("has_tables");
        const auto page = params_.integer<std::size_t>("page", 0, 1u << 30).value_or(0);
        const auto size = params_.integer<std::size_t>("page_size", 1, knowledge::kMaxPageSize).value_or(kDefaultPageSize);
        const auto result = data_.corpus.search(f, page, size);
        json docs = json::array();
        for (auto row : result.rows) docs.push_back(knowledge::document_json(data_.corpus.documents()[row]));
        return {{"total", result.total}, {"page", result.page}, {"page_size", result.page_size}, {"documents", docs}};
    }

    json clusters() {
        std::optional<knowledge::ClusterLevel> level;
        if (const auto raw = params_.text("level")) {
            if (*raw == "coarse") {
                level = knowledge::ClusterLevel::Coarse;
            } else if (*raw == "fine") {
                level = knowledge::ClusterLevel::Fine;
            } else {
                fail(400, "level must be 'coarse' or 'fine'", {{"field", "level"}});
            }
        }
        return knowledge::cluster_json(data_.corpus, data_.clusters, level);
    }

    const DocumentRecord& known(std::string_view doi) const {
        const auto row = data_.corpus.row_of(doi);
        if (row == npos) fail(404, "unknown document '" + std::string(doi) + "'");
        return data_.corpus.documents()[row];
    }

    json document(std::string_view doi) { return knowledge::document_json(known(doi)); }

    json neighbors(std::string_view doi) {
        known(doi);
        const auto n = data_.corpus.size();
        if (n < 2) fail(400, "corpus too small for neighbours");
        const auto k = params_.integer<std::size_t>("k", 1, n - 1).value_or(std::min(kDefaultNeighbors, n - 1));
        json out = json::array();
        try {
            for (const auto& nb : data_.corpus.semantic_neighbors(doi, k)) {
                const auto& d = data_.corpus.documents()[nb.row];
                out.push_back({{"doi", d.doi}, {"title", d.title}, {"similarity", nb.similarity}});
            }
        } catch (const DegenerateInputError& e) {
            fail(422, e.what());
        }
        return {{"doi", doi}, {"neighbors", out}};
    }

    json links(std::string_view doi) {
        json out = json::array();
        for (const auto& link : data_.doi_index.graphs_for_document(doi)) {
            out.push_back({{"graph", link.graph}, {"edges", link.edges}});
        }
        return out;
    }

    const Dataset& data_;
    const Request& req_;
    Params params_;
};

}  // namespace

Response Api::handle(const Request& request) const {
    Response response;
    response.headers[kVersionHeader] = dataset_.version;
    response.headers["Content-Type"] = "application/json";
    try {
        response.body = Router(dataset_, request).route().dump();
    } catch (const BadRequest& e) {
        response.status = e.status;
        response.body = e.body.dump();
    } catch (const std::exception& e) {
        response.status = 500;
        response.body = json{{"error", e.what()}}.dump();
    }
    return response;
}

struct HttpServer::Impl {
    explicit Impl(const Dataset& dataset) : api(dataset) {}

    Api api;
    httplib::Server server;
};

HttpServer::HttpServer(const Dataset& dataset, const ServeConfig& config) : impl_(std::make_unique<Impl>(dataset)) {
    const Api& api = impl_->api;
    auto adapt = [&api](const httplib::Request& req, httplib::Response& res) {
        Request request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [key, value] : req.params) request.query.emplace(key, value);
        request.body = req.body;
        const auto response = api.handle(request);
        res.status = response.status;
        for (const auto& [key, value] : response.headers) {
            if (key != "Content-Type") res.set_header(key, value);
        }
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(response.body, "application/json");
    };
    auto& server = impl_->server;
    server.Get(".*", adapt);
    server.Post(".*", adapt);
    server.Put(".*", adapt);
    server.Delete(".*", adapt);
    if (config.port == 0) {
        port_ = server.bind_to_any_port(config.bind_address);
    } else if (server.bind_to_port(config.bind_address, config.port)) {
        port_ = config.port;
    }
    if (port_ <= 0) {
        throw IoError(config.bind_address + ":" + std::to_string(config.port), "cannot bind port");
    }
}

HttpServer::~HttpServer() = default;

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void serve(const Dataset& dataset, const ServeConfig& config) { HttpServer(dataset, config).run(); }

}  // namespace atlas::server
