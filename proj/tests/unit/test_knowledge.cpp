#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "atlas/core/errors.hpp"
#include "atlas/knowledge/corpus.hpp"
#include "atlas/knowledge/hdbscan.hpp"
#include "atlas/knowledge/projection.hpp"
#include "support.hpp"

using namespace atlas;
using namespace atlas::knowledge;

namespace {

Eigen::MatrixXd random_matrix(support::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

Eigen::VectorXd signed_like_library(Eigen::VectorXd v) {
    Eigen::Index i = 0;
    v.cwiseAbs().maxCoeff(&i);
    return v(i) < 0 ? Eigen::VectorXd(-v) : v;
}

std::vector<DocumentRecord> random_documents(support::Rng& rng, std::size_t n) {
    static const std::vector<std::string> words = {"Cytokine", "storm", "kinase", "IL6", "receptor", "Trial"};
    static const std::vector<std::string> people = {"Ada Lovelace", "Alan Turing", "Grace Hopper", "Emmy Noether"};
    static const std::vector<std::string> houses = {"Elsevier", "Springer", "PLOS", "Nature"};
    std::vector<DocumentRecord> docs;
    for (std::size_t i = 0; i < n; ++i) {
        DocumentRecord d;
        d.doi = "10.9/doc" + std::to_string(1000 + rng.below(900000)) + "-" + std::to_string(i);
        d.title = words[rng.below(words.size())] + " " + words[rng.below(words.size())];
        d.abstract_text = words[rng.below(words.size())];
        d.authors = {people[rng.below(people.size())]};
        d.publisher = houses[rng.below(houses.size())];
        d.year = 2000 + static_cast<int>(rng.below(21));
        d.entities = {words[rng.below(words.size())]};
        d.artifacts = {static_cast<int>(rng.below(3)), static_cast<int>(rng.below(2))};
        d.row = i;
        docs.push_back(d);
    }
    return docs;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool has(const std::string& hay, const std::string& needle) { return lower(hay).find(lower(needle)) != std::string::npos; }

Eigen::MatrixXd golden_points(nlohmann::json& golden) {
    std::ifstream in(std::string(ATLAS_TEST_DATA_DIR) + "/blobs5.json");
    REQUIRE(in.good());
    golden = nlohmann::json::parse(in);
    const auto& pts = golden["points"];
    Eigen::MatrixXd points(static_cast<Eigen::Index>(pts.size()), 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        points(static_cast<Eigen::Index>(i), 0) = pts[i][0].get<double>();
        points(static_cast<Eigen::Index>(i), 1) = pts[i][1].get<double>();
    }
    return points;
}

}  // namespace

TEST_SUITE("knowledge") {

TEST_CASE("projection matches a dense eigensolver") {
    support::Rng rng(41);
    Eigen::MatrixXd data = random_matrix(rng, 500, 64);
    for (Eigen::Index j = 0; j < 64; ++j) data.col(j) *= 3.0 / (1.0 + 0.3 * static_cast<double>(j));
    data = data * Eigen::MatrixXd(Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(rng, 64, 64)).householderQ());
    const auto p = project_2d(data);

    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 499.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    const auto& values = solver.eigenvalues();
    CHECK(p.variances(0) == doctest::Approx(values(63)).epsilon(1e-6));
    CHECK(p.variances(1) == doctest::Approx(values(62)).epsilon(1e-6));
    const Eigen::VectorXd v0 = signed_like_library(solver.eigenvectors().col(63));
    const Eigen::VectorXd v1 = signed_like_library(solver.eigenvectors().col(62));
    CHECK((p.components.col(0) - v0).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((p.components.col(1) - v1).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((p.coords - centered * p.components).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("projection edge cases") {
    support::Rng rng(42);
    Eigen::MatrixXd rank1(50, 5);
    const Eigen::RowVectorXd dir = Eigen::RowVectorXd::LinSpaced(5, 1, 2);
    for (Eigen::Index i = 0; i < 50; ++i) rank1.row(i) = rng.normal() * dir;
    const auto p1 = project_2d(rank1);
    CHECK(p1.components.col(1).isZero());
    CHECK(p1.coords.col(1).isZero());

    const Eigen::MatrixXd flat = random_matrix(rng, 40, 2);
    const auto p2 = project_2d(flat);
    for (Eigen::Index i = 0; i < 40; ++i) {
        for (Eigen::Index j = i + 1; j < 40; ++j) {
            CHECK((p2.coords.row(i) - p2.coords.row(j)).norm() ==
                  doctest::Approx((flat.row(i) - flat.row(j)).norm()).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(project_2d(Eigen::MatrixXd::Ones(5, 3)), DegenerateInputError);
    CHECK_THROWS_AS(project_2d(Eigen::MatrixXd::Ones(1, 3)), DegenerateInputError);

    const Eigen::MatrixXf single = random_matrix(rng, 30, 4).cast<float>();
    CHECK(project_2d(single).coords.rows() == 30);
}

TEST_CASE("hdbscan preconditions and the unsplit case") {
    support::Rng rng(43);
    ClusterOptions options;
    CHECK_THROWS_AS(hdbscan(random_matrix(rng, 24, 2), options), PreconditionError);
    ClusterOptions bad = options;
    bad.min_cluster_size = 1;
    CHECK_THROWS_AS(hdbscan(random_matrix(rng, 50, 2), bad), PreconditionError);
    bad = options;
    bad.min_samples = 0;
    CHECK_THROWS_AS(hdbscan(random_matrix(rng, 50, 2), bad), PreconditionError);

    const Eigen::MatrixXd tight = 0.01 * random_matrix(rng, 25, 2);
    const auto tree = hdbscan(tight, options);
    std::size_t fine = 0;
    for (const auto& c : tree.clusters) fine += c.level == ClusterLevel::Fine;
    CHECK(fine == 1);
    CHECK(tree.noise.empty());
}

TEST_CASE("hdbscan recovers the golden blobs deterministically with nesting") {
    nlohmann::json golden;
    const auto points = golden_points(golden);
    ClusterOptions options;
    options.min_cluster_size = golden["min_cluster_size"].get<std::size_t>();
    options.min_samples = golden["min_samples"].get<std::size_t>();
    const auto tree = hdbscan(points, options);
    std::vector<long> labels;
    for (const auto& f : tree.fine_of) labels.push_back(f ? static_cast<long>(*f) : -1);
    CHECK(support::adjusted_rand_index(golden["truth"].get<std::vector<long>>(), labels) >= 0.95);

    const auto again = hdbscan(points, options);
    REQUIRE(again.clusters.size() == tree.clusters.size());
    for (std::size_t i = 0; i < tree.clusters.size(); ++i) {
        CHECK(again.clusters[i].members == tree.clusters[i].members);
        CHECK(again.clusters[i].stability == tree.clusters[i].stability);
        CHECK(again.clusters[i].boundary.has_value() == tree.clusters[i].boundary.has_value());
    }
    CHECK(again.noise == tree.noise);

    std::size_t covered = tree.noise.size();
    for (const auto& c : tree.clusters) {
        CHECK(std::is_sorted(c.members.begin(), c.members.end()));
        if (c.level == ClusterLevel::Coarse) continue;
        covered += c.members.size();
        REQUIRE(c.parent.has_value());
        const auto& coarse = tree.clusters[*c.parent];
        CHECK(coarse.level == ClusterLevel::Coarse);
        CHECK(std::includes(coarse.members.begin(), coarse.members.end(), c.members.begin(), c.members.end()));
        for (const auto m : c.members) CHECK(tree.fine_of[m] == c.id);
        REQUIRE(c.boundary.has_value());
        for (const auto m : c.members) CHECK(support::inside_or_on(c.boundary->vertices, points.row(m).transpose(), 1e-9));
    }
    CHECK(covered == static_cast<std::size_t>(points.rows()));
}

TEST_CASE("condensed tree rows are consistent") {
    support::Rng rng(44);
    const Eigen::MatrixXd pts = random_matrix(rng, 120, 2);
    const auto rows = condensed_tree(pts, 10, 3);
    std::set<std::size_t> points_seen;
    for (const auto& r : rows) {
        CHECK(r.lambda >= 0);
        if (r.child < 120) {
            CHECK(r.size == 1);
            CHECK(points_seen.insert(r.child).second);
        } else {
            CHECK(r.size >= 10);
        }
    }
    CHECK(points_seen.size() == 120);
}

TEST_CASE("semantic neighbours") {
    support::Rng rng(45);
    auto docs = random_documents(rng, 60);
    Eigen::MatrixXd emb = random_matrix(rng, 60, 8);
    emb.row(7) = emb.row(3);
    emb.row(11).setZero();
    const Corpus corpus(docs, emb, Eigen::MatrixXd::Zero(60, 2));
    std::vector<std::string> dois;
    for (const auto& d : docs) dois.push_back(d.doi);

    const auto near = corpus.semantic_neighbors(docs[3].doi, 5);
    REQUIRE(near.size() == 5);
    CHECK(near[0].row == 7);
    CHECK(near[0].similarity == doctest::Approx(1.0));
    for (std::size_t q = 0; q < 60; ++q) {
        if (q == 11) continue;
        const auto got = corpus.semantic_neighbors(docs[q].doi, 10);
        std::vector<std::size_t> rows;
        for (const auto& n : got) rows.push_back(n.row);
        CHECK(rows == support::brute_knn(emb, dois, q, 10));
    }
    CHECK(corpus.zero_norm_rows() == std::vector<std::size_t>{11});
    CHECK_THROWS_AS(corpus.semantic_neighbors(docs[11].doi, 3), DegenerateInputError);
    CHECK_THROWS_AS(corpus.semantic_neighbors("10.0/none", 3), UnknownEntityError);
    CHECK_THROWS_AS(corpus.semantic_neighbors(docs[0].doi, 0), PreconditionError);
    CHECK_THROWS_AS(corpus.semantic_neighbors(docs[0].doi, 60), PreconditionError);

    Eigen::MatrixXd ortho = Eigen::MatrixXd::Zero(3, 3);
    ortho(0, 0) = 1;
    ortho(1, 1) = 1;
    ortho(2, 0) = 1;
    ortho(2, 1) = 1;
    const Corpus small(random_documents(rng, 3), ortho, Eigen::MatrixXd::Zero(3, 2));
    const auto o = small.semantic_neighbors(small.documents()[0].doi, 2);
    CHECK(o[0].row == 2);
    CHECK(o[0].similarity == doctest::Approx(std::sqrt(0.5)));
    CHECK(o[1].similarity == doctest::Approx(0.0));

    CHECK_THROWS_AS(Corpus(random_documents(rng, 3), Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(3, 2)),
                    PreconditionError);
    auto twins = random_documents(rng, 2);
    twins[1].doi = twins[0].doi;
    CHECK_THROWS_AS(Corpus(twins, Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Zero(2, 2)), PreconditionError);
}

TEST_CASE("faceted search matches a direct filter") {
    support::Rng rng(46);
    const auto docs = random_documents(rng, 300);
    const Corpus corpus(docs, random_matrix(rng, 300, 4), Eigen::MatrixXd::Zero(300, 2));
    for (int trial = 0; trial < 200; ++trial) {
        SearchFacets f;
        if (rng.chance(0.4)) f.text = rng.chance(0.5) ? "cytokine" : "IL6 r";
        if (rng.chance(0.3)) f.author = "turing";
        if (rng.chance(0.3)) f.publisher = "PLOS";
        if (rng.chance(0.3)) f.year_min = 2000 + static_cast<int>(rng.below(21));
        if (rng.chance(0.3)) f.year_max = 2000 + static_cast<int>(rng.below(21));
        if (rng.chance(0.3)) f.has_figures = rng.chance(0.5);
        if (rng.chance(0.3)) f.has_tables = rng.chance(0.5);
        if (rng.chance(0.3)) f.entity = "kinase";
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const auto& d = docs[i];
            bool ok = true;
            if (f.text) ok = ok && (has(d.title, *f.text) || has(d.abstract_text, *f.text));
            if (f.author) ok = ok && has(d.authors[0], *f.author);
            if (f.publisher) ok = ok && has(d.publisher, *f.publisher);
            if (f.year_min) ok = ok && d.year >= *f.year_min;
            if (f.year_max) ok = ok && d.year <= *f.year_max;
            if (f.has_figures) ok = ok && (d.artifacts.figures > 0) == *f.has_figures;
            if (f.has_tables) ok = ok && (d.artifacts.tables > 0) == *f.has_tables;
            if (f.entity) ok = ok && has(d.entities[0], *f.entity);
            if (ok) want.push_back(i);
        }
        std::sort(want.begin(), want.end(), [&](std::size_t a, std::size_t b) {
            return docs[a].year != docs[b].year ? docs[a].year > docs[b].year : docs[a].doi < docs[b].doi;
        });
        const std::size_t page_size = 1 + rng.below(40);
        std::vector<std::size_t> got;
        std::size_t page = 0;
        for (;; ++page) {
            const auto p = corpus.search(f, page, page_size);
            CHECK(p.total == want.size());
            if (p.rows.empty()) break;
            got.insert(got.end(), p.rows.begin(), p.rows.end());
        }
        CHECK(got == want);
    }
    CHECK_THROWS_AS(corpus.search({}, 0, 0), PreconditionError);
    CHECK_THROWS_AS(corpus.search({}, 0, kMaxPageSize + 1), PreconditionError);
    CHECK(corpus.search({}, 0, kMaxPageSize).rows.size() == 300);
}

TEST_CASE("doi index is consistent with edge evidence") {
    support::Rng rng(47);
    auto first = support::random_graph(rng, 20, 80);
    auto second = support::random_graph(rng, 15, 40);
    second.id = "other";
    const DoiIndex index({&first, &second});
    for (const auto* g : {&first, &second}) {
        for (const auto& e : g->edges) {
            for (const auto& d : e.dois) {
                const auto links = index.graphs_for_document(d);
                const auto it = std::find_if(links.begin(), links.end(), [&](const GraphLink& l) { return l.graph == g->id; });
                REQUIRE(it != links.end());
                CHECK(std::binary_search(it->edges.begin(), it->edges.end(), e.id));
            }
        }
    }
    for (int k = 0; k < 12; ++k) {
        const auto links = index.graphs_for_document("10.1/d" + std::to_string(k));
        CHECK(std::is_sorted(links.begin(), links.end(), [](const GraphLink& a, const GraphLink& b) { return a.graph < b.graph; }));
        for (const auto& l : links) {
            const auto& g = l.graph == first.id ? first : second;
            for (const auto& id : l.edges) {
                const auto& e = g.edges[g.edge_index(id)];
                CHECK(std::binary_search(e.dois.begin(), e.dois.end(), "10.1/d" + std::to_string(k)));
            }
        }
    }
    CHECK(index.graphs_for_document("10.0/unknown").empty());
}

TEST_CASE("case-insensitive containment") {
    CHECK(contains_ignore_case("Cytokine Storm", "cytokine s"));
    CHECK(contains_ignore_case("abc", ""));
    CHECK_FALSE(contains_ignore_case("abc", "abcd"));
}

}  // TEST_SUITE
