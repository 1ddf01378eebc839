#include "atlas/fixtures/fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "atlas/core/errors.hpp"
#include "atlas/core/model.hpp"
#include "atlas/ingest/assemble.hpp"
#include "atlas/ingest/records.hpp"

namespace atlas::fixtures {

namespace {

constexpr std::array<std::string_view, 5> kSources = {"reach", "sparser", "medscan", "trips", "isi"};
constexpr std::array<std::string_view, 12> kSurnames = {"Alvarez", "Baker", "Chen",   "Dubois", "Eze",    "Fischer",
                                                        "Gupta",   "Hansen", "Ivanova", "Jones", "Kimura", "Laine"};
constexpr std::array<std::string_view, 6> kPublishers = {"Journal of Cell Signaling", "Immunology Letters",
                                                         "Virology Reports",          "Clinical Pharmacology",
                                                         "Molecular Systems",         "Cytokine Research"};

std::string padded(std::string_view prefix, std::size_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, value);
    return std::string(prefix) + buf;
}

std::string verb(StatementType type) {
    switch (type) {
        case StatementType::Activation: return "activates";
        case StatementType::IncreaseAmount: return "increases the amount of";
        case StatementType::Phosphorylation: return "phosphorylates";
        case StatementType::Inhibition: return "inhibits";
        case StatementType::DecreaseAmount: return "decreases the amount of";
        case StatementType::Dephosphorylation: return "dephosphorylates";
        case StatementType::Complex: return "binds";
        case StatementType::Association: break;
    }
    return "is associated with";
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

template <typename Range, typename Writer>
std::string lines(const Range& items, Writer write) {
    std::string out;
    for (const auto& item : items) {
        out += write(item);
        out += '\n';
    }
    return out;
}

struct GraphFiles {
    std::vector<Agent> agents;
    std::vector<CausalStatement> statements;
};

void write_dataset(const std::filesystem::path& out, ingest::Manifest manifest, const std::string& graph_id,
                   const GraphFiles& graph, const std::vector<DocumentRecord>& documents,
                   const Eigen::MatrixXd& embeddings) {
    const auto assembled = ingest::assemble(graph_id, graph.statements, graph.agents);
    manifest.graphs.front().agents = assembled.agents.size();
    manifest.graphs.front().edges = assembled.edges.size();

    const auto dir = out / "graphs" / graph_id;
    ingest::write_file(dir / "agents.jsonl", lines(graph.agents, ingest::serialize_agent));
    ingest::write_file(dir / "statements.jsonl", lines(graph.statements, ingest::serialize_statement));
    ingest::write_file(out / manifest.documents, lines(documents, ingest::serialize_document));
    ingest::write_matrix_bin(out / manifest.embeddings, embeddings);
    ingest::write_file(out / "manifest.json", ingest::serialize_manifest(manifest));
}

std::vector<std::string> build_ontology_leaves(Rng& rng, std::size_t depth, std::size_t branching) {
    std::vector<std::string> frontier{"root"};
    for (std::size_t level = 0; level < depth; ++level) {
        std::vector<std::string> next;
        for (const auto& parent : frontier) {
            const auto lo = static_cast<std::int64_t>(std::max<std::size_t>(1, (branching + 1) / 2));
            const auto count = static_cast<std::size_t>(rng.between(lo, static_cast<std::int64_t>(branching)));
            for (std::size_t k = 0; k < count; ++k) next.push_back(parent + "/c" + std::to_string(k));
        }
        frontier = std::move(next);
    }
    return frontier;
}

}  // namespace

void gen_dataset(const FixtureParams& p, const std::filesystem::path& out) {
    if (p.n_agents < 2 || p.n_statements == 0 || p.n_docs == 0 || p.embedding_dim == 0 || p.ontology_depth == 0 ||
        p.ontology_branching == 0) {
        throw PreconditionError("fixture sizes must be positive and n_agents at least 2");
    }
    if (p.n_statements + 1 < p.n_agents) throw PreconditionError("n_statements must be at least n_agents - 1");

    Rng rng(p.seed);
    const auto leaves = build_ontology_leaves(rng, p.ontology_depth, p.ontology_branching);
    GraphFiles graph;
    std::vector<std::size_t> topic_of_agent(p.n_agents);
    for (std::size_t i = 0; i < p.n_agents; ++i) {
        const auto& category = leaves[rng.below(leaves.size())];
        graph.agents.push_back({padded("A", i, 6), "agent " + std::to_string(i), category,
                                "Synthetic agent grounded to " + category});
        topic_of_agent[i] = static_cast<std::size_t>(std::stoul(std::string(split_category_path(category)[1].substr(1))));
    }
    std::size_t topics = 1;
    for (auto t : topic_of_agent) topics = std::max(topics, t + 1);

    std::vector<std::string> dois;
    for (std::size_t d = 0; d < p.n_docs; ++d) dois.push_back("10.0000/fixture." + padded("", d, 6));

    // Endpoint urn: each appearance is one unit of attachment weight.
    std::vector<std::size_t> urn{0};
    auto draw = [&](std::size_t limit) {
        if (!p.preferential) return rng.below(limit);
        std::size_t v;
        do {
            v = urn[rng.below(urn.size())];
        } while (v >= limit);
        return v;
    };
    auto add_statement = [&](std::size_t a, std::size_t b) {
        const auto type = kAllStatementTypes[rng.below(kAllStatementTypes.size())];
        CausalStatement s;
        s.id = padded("s", graph.statements.size(), 7);
        s.type = type;
        s.subj = graph.agents[a].id;
        s.obj = graph.agents[b].id;
        s.belief = round3(0.5 + 0.5 * rng.uniform());
        s.curated = rng.chance(0.2);
        const auto n_evidence = 1 + rng.below(3);
        for (std::size_t k = 0; k < n_evidence; ++k) {
            s.evidence.push_back({graph.agents[a].name + " " + verb(type) + " " + graph.agents[b].name + " (" +
                                      std::to_string(k + 1) + ").",
                                  dois[rng.below(dois.size())], std::string(kSources[rng.below(kSources.size())])});
        }
        graph.statements.push_back(std::move(s));
        urn.push_back(a);
        urn.push_back(b);
    };

    // A random attachment tree first, so every agent takes part.
    for (std::size_t i = 1; i < p.n_agents; ++i) {
        const auto other = draw(i);
        if (rng.chance(0.5)) {
            add_statement(i, other);
        } else {
            add_statement(other, i);
        }
    }
    while (graph.statements.size() < p.n_statements) {
        const auto a = draw(p.n_agents);
        const auto b = draw(p.n_agents);
        if (a != b) add_statement(a, b);
    }

    // Documents: one topic each, entities from that topic, embeddings around the topic centre.
    std::vector<std::vector<std::size_t>> agents_by_topic(topics);
    for (std::size_t i = 0; i < p.n_agents; ++i) agents_by_topic[topic_of_agent[i]].push_back(i);
    Eigen::MatrixXd centres(static_cast<Eigen::Index>(topics), static_cast<Eigen::Index>(p.embedding_dim));
    for (Eigen::Index t = 0; t < centres.rows(); ++t) {
        for (Eigen::Index j = 0; j < centres.cols(); ++j) centres(t, j) = 3.0 * rng.normal();
    }
    std::vector<DocumentRecord> documents;
    Eigen::MatrixXd embeddings(static_cast<Eigen::Index>(p.n_docs), static_cast<Eigen::Index>(p.embedding_dim));
    for (std::size_t d = 0; d < p.n_docs; ++d) {
        std::size_t topic = rng.below(topics);
        while (agents_by_topic[topic].empty()) topic = (topic + 1) % topics;
        const auto& pool = agents_by_topic[topic];
        DocumentRecord doc;
        doc.doi = dois[d];
        const auto n_entities = 1 + rng.below(std::min<std::size_t>(4, pool.size()));
        std::vector<std::string> names;
        for (std::size_t k = 0; k < n_entities; ++k) {
            const auto& agent = graph.agents[pool[rng.below(pool.size())]];
            if (std::find(doc.entities.begin(), doc.entities.end(), agent.name) == doc.entities.end()) {
                doc.entities.push_back(agent.name);
            }
        }
        doc.title = "Regulation of " + doc.entities.front() + " in topic " + std::to_string(topic);
        doc.abstract_text = "We study";
        for (const auto& e : doc.entities) doc.abstract_text += " " + e + ",";
        doc.abstract_text += " and report their interactions.";
        const auto n_authors = 1 + rng.below(4);
        for (std::size_t k = 0; k < n_authors; ++k) {
            doc.authors.push_back(std::string(kSurnames[rng.below(kSurnames.size())]) + " " +
                                  static_cast<char>('A' + rng.below(26)) + ".");
        }
        doc.publisher = std::string(kPublishers[rng.below(kPublishers.size())]);
        doc.year = static_cast<int>(rng.between(1995, 2024));
        doc.artifacts.figures = static_cast<int>(rng.below(9));
        doc.artifacts.tables = static_cast<int>(rng.below(5));
        doc.row = d;
        documents.push_back(std::move(doc));
        const auto r = static_cast<Eigen::Index>(d);
        for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
            embeddings(r, j) = centres(static_cast<Eigen::Index>(topic), j) + rng.normal();
        }
    }

    ingest::Manifest manifest;
    manifest.name = "Synthetic dataset (seed " + std::to_string(p.seed) + ")";
    manifest.graphs.push_back({std::string(kSyntheticGraphId), "Synthetic graph", std::nullopt, std::nullopt});
    std::sort(graph.agents.begin(), graph.agents.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });
    write_dataset(out, std::move(manifest), std::string(kSyntheticGraphId), graph, documents, embeddings);
}

void scenario_fixture(const std::filesystem::path& out) {
    GraphFiles graph;
    auto agent = [&](std::string id, std::string name, std::string category, std::string description) {
        graph.agents.push_back({std::move(id), std::move(name), std::move(category), std::move(description)});
    };
    agent("SARS-CoV-2", "SARS-CoV-2", "root/organism/virus", "Severe acute respiratory syndrome coronavirus 2");
    agent("COVID-19", "COVID-19", "root/disease/viral-disease", "Coronavirus disease 2019");
    agent("IL6", "IL6", "root/protein/cytokine", "Interleukin 6");
    agent("tocilizumab", "tocilizumab", "root/chemical/drug", "Monoclonal antibody against the IL6 receptor");
    agent("immune-response", "immune response", "root/process/immune", "Immune system process");

    constexpr std::array<std::string_view, 4> kProteinLeaves = {"root/protein/receptor", "root/protein/kinase",
                                                                "root/protein/transcription-factor",
                                                                "root/protein/cytokine"};
    constexpr std::array<std::string_view, 3> kProcessLeaves = {"root/process/inflammation", "root/process/signaling",
                                                                "root/process/immune"};
    const std::size_t other_targets = kTocilizumabTargets - 2;  // IL6 and immune-response are named
    for (std::size_t i = 1; i <= other_targets; ++i) {
        agent(padded("TCZT", i, 3), "tocilizumab target " + std::to_string(i),
              std::string(kProteinLeaves[i % kProteinLeaves.size()]), "Protein downstream of tocilizumab");
    }
    const std::size_t regulators = kIl6IncomingNeighbors - 2;  // plus tocilizumab and SARS-CoV-2
    for (std::size_t i = 1; i <= regulators; ++i) {
        agent(padded("IL6REG", i, 4), "IL6 regulator " + std::to_string(i),
              std::string(kProteinLeaves[i % kProteinLeaves.size()]), "Upstream regulator of IL6");
    }
    const std::size_t effectors = kIl6OutgoingNeighbors - 1;  // plus COVID-19
    for (std::size_t i = 1; i <= effectors; ++i) {
        agent(padded("IL6EFF", i, 4), "IL6 effector " + std::to_string(i),
              std::string(kProcessLeaves[i % kProcessLeaves.size()]), "Process downstream of IL6");
    }

    constexpr std::size_t kDocs = 90;
    std::vector<std::string> dois{std::string(kSeedDois[0]), std::string(kSeedDois[1])};
    for (std::size_t d = dois.size(); d < kDocs; ++d) dois.push_back("10.0000/covid." + padded("", d, 4));

    std::size_t next_id = 0;
    auto statement = [&](StatementType type, std::string subj, std::string obj, bool curated,
                         std::vector<Evidence> evidence) {
        graph.statements.push_back(
            {padded("st", ++next_id, 5), type, std::move(subj), std::move(obj), 0.95, curated, std::move(evidence)});
    };
    auto cite = [&](std::size_t k) { return dois[2 + k % (kDocs - 2)]; };
    auto source = [](std::size_t k) { return std::string(kSources[k % kSources.size()]); };

    // tocilizumab -> IL6: 39 distinct evidence items spread over three statements,
    // the third repeating one item verbatim.
    std::vector<Evidence> tcz_il6;
    for (std::size_t k = 0; k < kTocilizumabIl6Evidence; ++k) {
        const std::string doi = k == 0 ? std::string(kSeedDois[1]) : cite(k);
        tcz_il6.push_back({"Tocilizumab blocks IL6 signalling (excerpt " + std::to_string(k + 1) + ").", doi, source(k)});
    }
    statement(StatementType::Inhibition, "tocilizumab", "IL6", true, {tcz_il6.begin(), tcz_il6.begin() + 20});
    statement(StatementType::Inhibition, "tocilizumab", "IL6", false, {tcz_il6.begin() + 20, tcz_il6.end()});
    statement(StatementType::Inhibition, "tocilizumab", "IL6", false, {tcz_il6[3]});

    statement(StatementType::IncreaseAmount, "SARS-CoV-2", "IL6", false,
              {{"SARS-CoV-2 increases the amount of IL6.", cite(100), "reach"},
               {"Infection with SARS-CoV-2 raises IL6 levels in patients.", cite(101), "sparser"}});
    statement(StatementType::Activation, "IL6", "COVID-19", true,
              {{"Elevated IL6 is associated with severe COVID-19 and higher mortality.", std::string(kSeedDois[0]),
                "reach"},
               {"IL6 drives the cytokine storm in COVID-19.", cite(102), "medscan"}});
    statement(StatementType::Activation, "SARS-CoV-2", "COVID-19", true,
              {{"SARS-CoV-2 causes COVID-19.", cite(103), "reach"}});
    statement(StatementType::Inhibition, "tocilizumab", "immune-response", false,
              {{"Tocilizumab may lower the ability of the immune system, increasing the risk of superinfections.",
                cite(104), "reach"}});

    constexpr std::array<StatementType, 6> kTypes = {StatementType::Activation,      StatementType::Inhibition,
                                                        StatementType::IncreaseAmount,  StatementType::DecreaseAmount,
                                                        StatementType::Phosphorylation, StatementType::Association};
    auto generic = [&](std::size_t k, const std::string& subj, const std::string& obj, StatementType type) {
        statement(type, subj, obj, k % 7 == 0,
                  {{subj + " " + verb(type) + " " + obj + ".", cite(k), source(k)}});
    };
    // The first five types are directed; tocilizumab's and IL6's edges use only those.
    for (std::size_t i = 1; i <= other_targets; ++i) {
        generic(i, "tocilizumab", padded("TCZT", i, 3), kTypes[i % 5]);
    }
    for (std::size_t i = 1; i <= regulators; ++i) generic(i, padded("IL6REG", i, 4), "IL6", kTypes[i % 5]);
    for (std::size_t i = 1; i <= effectors; ++i) generic(i, "IL6", padded("IL6EFF", i, 4), kTypes[i % 5]);
    // Background structure away from the walkthrough endpoints.
    for (std::size_t i = 1; i + 1 <= regulators; i += 7) {
        generic(i, padded("IL6REG", i, 4), padded("IL6REG", i + 1, 4), kTypes[i % kTypes.size()]);
    }
    for (std::size_t i = 1; i <= effectors; i += 11) {
        generic(i, padded("IL6EFF", i, 4), padded("IL6REG", i, 4), kTypes[i % 5]);
    }
    for (std::size_t i = 1; i + 2 <= other_targets; i += 3) {
        generic(i, padded("TCZT", i, 3), padded("TCZT", i + 2, 3), StatementType::Complex);
    }

    // Corpus: three topics around the walkthrough.
    struct Topic {
        std::string_view title;
        std::vector<std::string> entities;
    };
    const std::array<Topic, 3> topics = {{
        {"Cytokine release in severe COVID-19", {"IL6", "SARS-CoV-2", "COVID-19"}},
        {"Tocilizumab as a treatment for COVID-19", {"tocilizumab", "IL6", "COVID-19"}},
        {"Immune suppression and superinfection risk", {"tocilizumab", "immune response"}},
    }};
    Rng rng(20200311);
    constexpr Eigen::Index kDim = 16;
    Eigen::MatrixXd centres(3, kDim);
    for (Eigen::Index t = 0; t < 3; ++t) {
        for (Eigen::Index j = 0; j < kDim; ++j) centres(t, j) = 4.0 * rng.normal();
    }
    std::vector<DocumentRecord> documents;
    Eigen::MatrixXd embeddings(static_cast<Eigen::Index>(kDocs), kDim);
    for (std::size_t d = 0; d < kDocs; ++d) {
        const std::size_t t = d < 2 ? d : d % 3;
        const auto& topic = topics[t];
        DocumentRecord doc;
        doc.doi = dois[d];
        doc.title = d == 0   ? "Cytokine release syndrome in severe COVID-19"
                    : d == 1 ? "Tocilizumab treatment in COVID-19 patients"
                             : std::string(topic.title) + " (study " + std::to_string(d) + ")";
        doc.entities = topic.entities;
        doc.abstract_text = "This study examines";
        for (const auto& e : doc.entities) doc.abstract_text += " " + e + ",";
        doc.abstract_text += " with clinical and molecular evidence.";
        doc.authors = {std::string(kSurnames[d % kSurnames.size()]) + " " + static_cast<char>('A' + d % 26) + ".",
                       std::string(kSurnames[(d + 5) % kSurnames.size()]) + " R."};
        doc.publisher = std::string(kPublishers[d % kPublishers.size()]);
        doc.year = 2020 + static_cast<int>(d % 3);
        doc.artifacts.figures = static_cast<int>(d % 5);
        doc.artifacts.tables = static_cast<int>((d / 2) % 3);
        doc.row = d;
        documents.push_back(std::move(doc));
        for (Eigen::Index j = 0; j < kDim; ++j) {
            embeddings(static_cast<Eigen::Index>(d), j) = centres(static_cast<Eigen::Index>(t), j) + rng.normal();
        }
    }

    ingest::Manifest manifest;
    manifest.name = "COVID-19 walkthrough";
    manifest.graphs.push_back(
        {std::string(kScenarioGraphId), std::string(kScenarioGraphName), std::nullopt, std::nullopt});
    std::sort(graph.agents.begin(), graph.agents.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });
    write_dataset(out, std::move(manifest), std::string(kScenarioGraphId), graph, documents, embeddings);
}

}  // namespace atlas::fixtures
