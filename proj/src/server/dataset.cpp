#include "atlas/server/dataset.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "atlas/core/errors.hpp"
#include "atlas/knowledge/projection.hpp"

namespace atlas::server {

using nlohmann::json;

namespace {

std::string relative_name(const std::filesystem::path& root, const std::filesystem::path& path) {
    return path.lexically_relative(root).generic_string();
}

void require_file(const std::filesystem::path& path, const std::string& name) {
    if (!std::filesystem::is_regular_file(path)) throw IoError(name, "missing file (" + path.string() + ")");
}

std::size_t count_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) ++n;
    }
    return n;
}

GraphData load_graph(const std::filesystem::path& root, const ingest::GraphEntry& entry, const LoadOptions& options) {
    const auto dir = root / "graphs" / entry.id;
    const auto agents_path = dir / "agents.jsonl";
    const auto statements_path = dir / "statements.jsonl";
    require_file(agents_path, relative_name(root, agents_path));
    require_file(statements_path, relative_name(root, statements_path));

    GraphData data;
    data.entry = entry;
    auto agents = ingest::read_agents_file(agents_path);
    const auto statements = ingest::read_statements_file(statements_path);
    data.agent_records = agents.size();
    data.statement_records = statements.size();

    ingest::AssemblyOptions assembly;
    assembly.min_belief = options.min_belief;
    data.graph = ingest::assemble(entry.id, statements, std::move(agents), assembly);
    if (entry.agents && *entry.agents != data.graph.agents.size()) {
        throw FormatError("graph '" + entry.id + "': manifest declares " + std::to_string(*entry.agents) +
                          " agents, found " + std::to_string(data.graph.agents.size()));
    }
    if (entry.edges && *entry.edges != data.graph.edges.size()) {
        throw FormatError("graph '" + entry.id + "': manifest declares " + std::to_string(*entry.edges) +
                          " edges, assembled " + std::to_string(data.graph.edges.size()));
    }
    data.bundles = ingest::bundle_all_levels(data.graph);
    data.pack = layout::pack_graph(data.graph);
    return data;
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& root, const std::string& name) {
    const auto path = root / name;
    require_file(path, name);
    return ingest::read_matrix_bin(path);
}

json pack_json(const layout::CirclePack& pack) {
    json out = json::array();
    for (const auto& node : pack.nodes()) {
        out.push_back({node.id, node.circle.center.x(), node.circle.center.y(), node.circle.radius});
    }
    return out;
}

json bundles_json(const std::vector<std::vector<ingest::HyperEdge>>& levels) {
    json out = json::array();
    for (const auto& level : levels) {
        json bundles = json::array();
        for (const auto& b : level) bundles.push_back({b.id(), b.count});
        out.push_back(std::move(bundles));
    }
    return out;
}

}  // namespace

const GraphData* Dataset::graph(std::string_view id) const {
    for (const auto& g : graphs) {
        if (g.entry.id == id) return &g;
    }
    return nullptr;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

Dataset load_dataset(const std::filesystem::path& root, const LoadOptions& options) {
    Dataset dataset;
    dataset.root = root;
    dataset.options = options;
    const auto manifest_path = root / "manifest.json";
    require_file(manifest_path, "manifest.json");
    dataset.manifest = ingest::read_manifest(manifest_path);

    for (const auto& entry : dataset.manifest.graphs) {
        dataset.graphs.push_back(load_graph(root, entry, options));
    }

    const auto documents_path = root / dataset.manifest.documents;
    require_file(documents_path, dataset.manifest.documents);
    auto documents = ingest::read_documents_file(documents_path);
    if (documents.size() != count_records(documents_path)) {
        throw FormatError(dataset.manifest.documents + ": record count differs from line count");
    }
    Eigen::MatrixXd embeddings = load_matrix(root, dataset.manifest.embeddings);
    if (static_cast<std::size_t>(embeddings.rows()) != documents.size()) {
        throw FormatError(dataset.manifest.embeddings + ": holds " + std::to_string(embeddings.rows()) +
                          " rows for " + std::to_string(documents.size()) + " documents");
    }

    Eigen::MatrixXd coords;
    if (!dataset.manifest.coords.empty()) {
        coords = load_matrix(root, dataset.manifest.coords);
        if (static_cast<std::size_t>(coords.rows()) != documents.size() || coords.cols() != 2) {
            throw FormatError(dataset.manifest.coords + ": expected " + std::to_string(documents.size()) +
                              " rows of 2 coordinates");
        }
    } else if (documents.size() >= 2) {
        coords = knowledge::project_2d(embeddings).coords;
        dataset.projected = true;
    } else {
        coords = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(documents.size()), 2);
    }

    dataset.corpus = knowledge::Corpus(std::move(documents), std::move(embeddings), std::move(coords));
    if (!dataset.corpus.zero_norm_rows().empty()) {
        dataset.warnings.push_back(std::to_string(dataset.corpus.zero_norm_rows().size()) +
                                   " documents have zero embeddings and are excluded from neighbour search");
    }

    knowledge::ClusterOptions cluster_options;
    cluster_options.min_cluster_size = options.min_cluster_size;
    cluster_options.min_samples = options.min_samples;
    cluster_options.alpha_radius = options.alpha_radius;
    if (dataset.corpus.size() >= options.min_cluster_size) {
        dataset.clusters = knowledge::hdbscan(dataset.corpus.coords(), cluster_options);
    } else {
        dataset.warnings.push_back("corpus smaller than min_cluster_size; every document is noise");
        const auto n = dataset.corpus.size();
        dataset.clusters.fine_of.assign(n, std::nullopt);
        dataset.clusters.coarse_of.assign(n, std::nullopt);
        for (std::size_t i = 0; i < n; ++i) dataset.clusters.noise.push_back(i);
    }

    std::vector<const AssembledGraph*> graphs;
    for (const auto& g : dataset.graphs) graphs.push_back(&g.graph);
    dataset.doi_index = knowledge::DoiIndex(graphs);
    dataset.version = fnv1a_hex(serialize_precomputation(dataset));
    return dataset;
}

std::string serialize_precomputation(const Dataset& dataset) {
    json graphs = json::array();
    for (const auto& g : dataset.graphs) {
        json edges = json::array();
        for (const auto& e : g.graph.edges) edges.push_back({e.id, e.evidence_count});
        graphs.push_back({{"id", g.entry.id},
                          {"agents", g.graph.agents.size()},
                          {"edges", std::move(edges)},
                          {"pack", pack_json(g.pack)},
                          {"bundles", bundles_json(g.bundles)}});
    }
    json coords = json::array();
    const auto& c = dataset.corpus.coords();
    for (Eigen::Index i = 0; i < c.rows(); ++i) coords.push_back({c(i, 0), c(i, 1)});
    return json{{"graphs", std::move(graphs)},
                {"coords", std::move(coords)},
                {"clusters", knowledge::cluster_json(dataset.corpus, dataset.clusters, std::nullopt)}}
        .dump();
}

}  // namespace atlas::server
