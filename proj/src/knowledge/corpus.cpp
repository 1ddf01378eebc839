#include "atlas/knowledge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

#include "atlas/core/errors.hpp"

namespace atlas::knowledge {

using nlohmann::json;

namespace {

bool any_contains(const std::vector<std::string>& values, std::string_view needle) {
    return std::any_of(values.begin(), values.end(),
                       [&](const std::string& v) { return contains_ignore_case(v, needle); });
}

json polygon_json(const std::optional<geometry::Polygon>& polygon) {
    if (!polygon) return nullptr;
    json out = json::array();
    for (const auto& v : polygon->vertices) out.push_back({v.x(), v.y()});
    return out;
}

}  // namespace

bool contains_ignore_case(std::string_view haystack, std::string_view needle) {
    const auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
    return it != haystack.end() || needle.empty();
}

Corpus::Corpus(std::vector<DocumentRecord> documents, Eigen::MatrixXd embeddings, Eigen::MatrixXd coords)
    : documents_(std::move(documents)), embeddings_(std::move(embeddings)), coords_(std::move(coords)) {
    const auto n = static_cast<Eigen::Index>(documents_.size());
    if (embeddings_.rows() != n) {
        throw PreconditionError("embedding matrix has " + std::to_string(embeddings_.rows()) + " rows for " +
                                std::to_string(n) + " documents");
    }
    if (coords_.rows() != n || coords_.cols() != 2) {
        throw PreconditionError("coordinate matrix must be " + std::to_string(n) + " x 2");
    }
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        documents_[i].row = i;
        if (!rows_.emplace(documents_[i].doi, i).second) {
            throw PreconditionError("duplicate document doi '" + documents_[i].doi + "'");
        }
    }
    norms_ = embeddings_.rowwise().norm();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (norms_(i) == 0.0) zero_norm_.push_back(static_cast<std::size_t>(i));
    }
    by_year_.resize(documents_.size());
    std::iota(by_year_.begin(), by_year_.end(), 0);
    std::sort(by_year_.begin(), by_year_.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = documents_[a];
        const auto& y = documents_[b];
        return x.year != y.year ? x.year > y.year : x.doi < y.doi;
    });
}

std::size_t Corpus::row_of(std::string_view doi) const {
    const auto it = rows_.find(std::string(doi));
    return it == rows_.end() ? npos : it->second;
}

const DocumentRecord& Corpus::document(std::string_view doi) const {
    const auto row = row_of(doi);
    if (row == npos) throw UnknownEntityError("document", std::string(doi));
    return documents_[row];
}

std::vector<Neighbor> Corpus::semantic_neighbors(std::string_view doi, std::size_t k) const {
    const auto query = row_of(doi);
    if (query == npos) throw UnknownEntityError("document", std::string(doi));
    if (k < 1 || k >= size()) {
        throw PreconditionError("k must lie in [1, " + std::to_string(size() - 1) + "], got " + std::to_string(k));
    }
    const auto q = static_cast<Eigen::Index>(query);
    if (norms_(q) == 0.0) throw DegenerateInputError("document '" + std::string(doi) + "' has a zero embedding");

    const Eigen::VectorXd dots = embeddings_ * embeddings_.row(q).transpose();
    std::vector<Neighbor> all;
    all.reserve(size());
    for (Eigen::Index i = 0; i < embeddings_.rows(); ++i) {
        if (i == q || norms_(i) == 0.0) continue;
        all.push_back({static_cast<std::size_t>(i), dots(i) / (norms_(i) * norms_(q))});
    }
    const auto better = [&](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return documents_[a.row].doi < documents_[b.row].doi;
    };
    const std::size_t take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), better);
    all.resize(take);
    return all;
}

bool Corpus::matches(const DocumentRecord& doc, const SearchFacets& f) {
    if (f.text && !contains_ignore_case(doc.title, *f.text) && !contains_ignore_case(doc.abstract_text, *f.text)) {
        return false;
    }
    if (f.author && !any_contains(doc.authors, *f.author)) return false;
    if (f.publisher && !contains_ignore_case(doc.publisher, *f.publisher)) return false;
    if (f.entity && !any_contains(doc.entities, *f.entity)) return false;
    if (f.year_min && doc.year < *f.year_min) return false;
    if (f.year_max && doc.year > *f.year_max) return false;
    if (f.has_figures && (doc.artifacts.figures > 0) != *f.has_figures) return false;
    if (f.has_tables && (doc.artifacts.tables > 0) != *f.has_tables) return false;
    return true;
}

DocumentPage Corpus::search(const SearchFacets& facets, std::size_t page, std::size_t page_size) const {
    if (page_size < 1 || page_size > kMaxPageSize) {
        throw PreconditionError("page_size must lie in [1, " + std::to_string(kMaxPageSize) + "], got " +
                                std::to_string(page_size));
    }
    DocumentPage out;
    out.page = page;
    out.page_size = page_size;
    const std::size_t first = page * page_size;
    for (auto row : by_year_) {
        if (!matches(documents_[row], facets)) continue;
        if (out.total >= first && out.rows.size() < page_size) out.rows.push_back(row);
        ++out.total;
    }
    return out;
}

json document_json(const DocumentRecord& doc) {
    return {{"doi", doc.doi},
            {"title", doc.title},
            {"authors", doc.authors},
            {"publisher", doc.publisher},
            {"year", doc.year},
            {"abstract", doc.abstract_text},
            {"entities", doc.entities},
            {"figures", doc.artifacts.figures},
            {"tables", doc.artifacts.tables}};
}

json cluster_json(const Corpus& corpus, const ClusterTree& tree, std::optional<ClusterLevel> level) {
    json points = json::array();
    const auto& coords = corpus.coords();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        std::optional<std::size_t> cluster;
        if (level == ClusterLevel::Coarse) {
            cluster = tree.coarse_of[i];
        } else {
            cluster = tree.fine_of[i];
        }
        const auto r = static_cast<Eigen::Index>(i);
        points.push_back({{"doi", corpus.documents()[i].doi},
                          {"x", coords(r, 0)},
                          {"y", coords(r, 1)},
                          {"cluster", cluster ? json(*cluster) : json(nullptr)}});
    }
    json clusters = json::array();
    for (const auto& c : tree.clusters) {
        if (level && c.level != *level) continue;
        clusters.push_back({{"id", c.id},
                            {"parent", c.parent ? json(*c.parent) : json(nullptr)},
                            {"level", to_string(c.level)},
                            {"hue", c.hue},
                            {"stability", c.stability},
                            {"size", c.members.size()},
                            {"polygon", polygon_json(c.boundary)}});
    }
    json noise = json::array();
    for (auto row : tree.noise) noise.push_back(corpus.documents()[row].doi);
    return {{"points", points}, {"clusters", clusters}, {"noise", noise}};
}

DoiIndex::DoiIndex(const std::vector<const AssembledGraph*>& graphs) {
    std::map<std::string, std::map<std::string, std::set<std::string>>> index;
    for (const auto* graph : graphs) {
        for (const auto& edge : graph->edges) {
            for (const auto& evidence : edge.evidence) {
                if (!evidence.doi.empty()) index[evidence.doi][graph->id].insert(edge.id);
            }
        }
    }
    for (auto& [doi, by_graph] : index) {
        auto& links = links_[doi];
        for (auto& [graph, edges] : by_graph) links.push_back({graph, {edges.begin(), edges.end()}});
    }
}

std::vector<GraphLink> DoiIndex::graphs_for_document(std::string_view doi) const {
    const auto it = links_.find(std::string(doi));
    return it == links_.end() ? std::vector<GraphLink>{} : it->second;
}

}  // namespace atlas::knowledge
