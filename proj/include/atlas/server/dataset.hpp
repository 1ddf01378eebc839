#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/core/model.hpp"
#include "atlas/ingest/assemble.hpp"
#include "atlas/ingest/records.hpp"
#include "atlas/knowledge/corpus.hpp"
#include "atlas/knowledge/hdbscan.hpp"
#include "atlas/layout/circle_pack.hpp"

namespace atlas::server {

struct LoadOptions {
    double min_belief = 0.0;
    std::optional<double> alpha_radius;
    std::size_t min_cluster_size = 25;
    std::size_t min_samples = 5;
    double lod_threshold_px = 50.0;
};

struct GraphData {
    ingest::GraphEntry entry;
    std::size_t statement_records = 0;  // lines read from statements.jsonl
    std::size_t agent_records = 0;
    AssembledGraph graph;
    layout::CirclePack pack;
    std::vector<std::vector<ingest::HyperEdge>> bundles;  // per level
};

/// Everything the API serves, fully precomputed and read-only after loading.
struct Dataset {
    std::filesystem::path root;
    ingest::Manifest manifest;
    LoadOptions options;
    std::vector<GraphData> graphs;  // manifest order
    knowledge::Corpus corpus;
    knowledge::ClusterTree clusters;
    knowledge::DoiIndex doi_index;
    bool projected = false;  // coordinates came from the built-in projection
    std::vector<std::string> warnings;
    std::string version;     // hash of the serialized precomputation

    const GraphData* graph(std::string_view id) const;
};

/// Parses, assembles, bundles every level, packs, projects (unless coords ship),
/// clusters and indexes the directory. Throws IoError naming the missing file,
/// ParseError with file and line, FormatError for mismatched matrix shapes,
/// AssemblyError for inconsistent graphs.
Dataset load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

/// Canonical JSON text of all derived structures: packs, bundles, coordinates
/// and clusters. Two loads of the same directory produce identical text.
std::string serialize_precomputation(const Dataset& dataset);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace atlas::server
