#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "atlas/core/errors.hpp"
#include "atlas/core/model.hpp"
#include "atlas/fixtures/fixtures.hpp"
#include "atlas/ingest/records.hpp"
#include "atlas/knowledge/corpus.hpp"
#include "atlas/server/api.hpp"
#include "atlas/server/dataset.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct LoadFlags {
    std::string data;
    double min_belief = 0.0;
    double lod_px = 50.0;
    std::optional<double> alpha;
    std::size_t min_cluster_size = 25;
    std::size_t min_samples = 5;

    atlas::server::LoadOptions options() const {
        atlas::server::LoadOptions o;
        o.min_belief = min_belief;
        o.lod_threshold_px = lod_px;
        o.alpha_radius = alpha;
        o.min_cluster_size = min_cluster_size;
        o.min_samples = min_samples;
        return o;
    }
};

void add_cluster_flags(CLI::App* cmd, LoadFlags& flags) {
    cmd->add_option("--min-cluster-size", flags.min_cluster_size, "Smallest density cluster")->check(CLI::Range(2, 1 << 30));
    cmd->add_option("--min-samples", flags.min_samples, "Neighbours defining core distance")->check(CLI::Range(1, 1 << 30));
    cmd->add_option("--alpha", flags.alpha, "Alpha radius for cluster outlines")->check(CLI::PositiveNumber);
}

atlas::server::Dataset load(const LoadFlags& flags) {
    const auto start = Clock::now();
    auto dataset = atlas::server::load_dataset(flags.data, flags.options());
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    for (const auto& g : dataset.graphs) {
        std::cerr << "graph " << g.entry.id << ": " << g.agent_records << " agents, " << g.statement_records
                  << " statements -> " << g.graph.edges.size() << " edges, " << g.bundles.size() << " bundle levels\n";
    }
    std::size_t fine = 0;
    for (const auto& c : dataset.clusters.clusters) fine += c.level == atlas::knowledge::ClusterLevel::Fine;
    std::cerr << "corpus: " << dataset.corpus.size() << " documents, " << fine << " fine clusters, "
              << dataset.clusters.noise.size() << " noise" << (dataset.projected ? " (projected)" : "") << "\n";
    for (const auto& w : dataset.warnings) std::cerr << "warning: " << w << "\n";
    std::fprintf(stderr, "loaded in %.2f s, version %s\n", seconds, dataset.version.c_str());
    return dataset;
}

int run_ingest(const LoadFlags& flags) {
    const auto dataset = load(flags);
    int errors = 0;
    for (const auto& g : dataset.graphs) {
        for (const auto& issue : atlas::validate_dataset(g.graph)) {
            errors += issue.severity == atlas::Severity::Error;
            std::cout << g.entry.id << ": " << atlas::to_string(issue.severity) << " " << issue.code << " "
                      << issue.subject << ": " << issue.message << "\n";
        }
    }
    const auto cache = std::filesystem::path(flags.data) / "cache" / "precomputation.json";
    atlas::ingest::write_file(cache, atlas::server::serialize_precomputation(dataset));
    std::cout << "wrote " << cache.string() << "\n";
    return errors == 0 ? 0 : 1;
}

int run_cluster(const LoadFlags& flags, const std::string& level, const std::string& out) {
    const auto dataset = load(flags);
    std::optional<atlas::knowledge::ClusterLevel> which;
    if (level == "coarse") which = atlas::knowledge::ClusterLevel::Coarse;
    if (level == "fine") which = atlas::knowledge::ClusterLevel::Fine;
    const auto text = atlas::knowledge::cluster_json(dataset.corpus, dataset.clusters, which).dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        atlas::ingest::write_file(out, text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph exploration engine"};
    app.require_subcommand(1);

    LoadFlags ingest_flags;
    auto* ingest = app.add_subcommand("ingest", "Validate a dataset and write its precomputation cache");
    ingest->add_option("dir", ingest_flags.data, "Dataset directory")->required();
    ingest->add_option("--min-belief", ingest_flags.min_belief, "Drop statements below this belief");

    LoadFlags serve_flags;
    atlas::server::ServeConfig serve_config;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
    serve->add_option("--data", serve_flags.data, "Dataset directory")->required();
    serve->add_option("--port", serve_config.port, "Port")->check(CLI::Range(1, 65535));
    serve->add_option("--bind", serve_config.bind_address, "Bind address");
    serve->add_option("--min-belief", serve_flags.min_belief, "Drop statements below this belief");
    serve->add_option("--lod-px", serve_flags.lod_px, "Projected radius that discloses children")->check(CLI::PositiveNumber);
    add_cluster_flags(serve, serve_flags);

    LoadFlags cluster_flags;
    std::string level = "all";
    std::string cluster_out;
    auto* cluster = app.add_subcommand("cluster", "Cluster the corpus and print the cluster export");
    cluster->add_option("--data", cluster_flags.data, "Dataset directory")->required();
    cluster->add_option("--level", level, "coarse, fine or all")->check(CLI::IsMember({"coarse", "fine", "all"}));
    cluster->add_option("--out", cluster_out, "Write to this file instead of stdout");
    add_cluster_flags(cluster, cluster_flags);

    atlas::fixtures::FixtureParams params;
    std::string fixture_out;
    bool scenario = false;
    auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic or scenario dataset");
    gen->add_option("--out", fixture_out, "Output directory")->required();
    gen->add_option("--seed", params.seed, "Seed");
    gen->add_option("--nodes", params.n_agents, "Agents");
    gen->add_option("--edges", params.n_statements, "Statements");
    gen->add_option("--docs", params.n_docs, "Documents");
    gen->add_option("--dim", params.embedding_dim, "Embedding dimension");
    gen->add_option("--depth", params.ontology_depth, "Ontology depth");
    gen->add_option("--branching", params.ontology_branching, "Ontology branching");
    gen->add_flag("--scenario", scenario, "Write the COVID-19 walkthrough dataset instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return run_ingest(ingest_flags);
        if (*cluster) return run_cluster(cluster_flags, level, cluster_out);
        if (*serve) {
            const auto dataset = load(serve_flags);
            std::cerr << "listening on " << serve_config.bind_address << ":" << serve_config.port << "\n";
            atlas::server::serve(dataset, serve_config);
            return 0;
        }
        if (*gen) {
            if (scenario) {
                atlas::fixtures::scenario_fixture(fixture_out);
            } else {
                atlas::fixtures::gen_dataset(params, fixture_out);
            }
            std::cerr << "wrote " << fixture_out << "\n";
            return 0;
        }
    } catch (const atlas::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
