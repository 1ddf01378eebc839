#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "atlas/core/document.hpp"
#include "atlas/core/model.hpp"

namespace atlas::ingest {

// Line-delimited JSON records. Blank lines are skipped; every other line must
// hold exactly one object. Errors carry the 1-based line number.

std::vector<CausalStatement> parse_statements(std::istream& in, std::string_view source = "statements");
std::string serialize_statement(const CausalStatement& statement);

std::vector<Agent> parse_agents(std::istream& in, std::string_view source = "agents");
std::string serialize_agent(const Agent& agent);

/// Rows are assigned from line order.
std::vector<DocumentRecord> parse_documents(std::istream& in, std::string_view source = "documents");
std::string serialize_document(const DocumentRecord& doc);

std::vector<CausalStatement> read_statements_file(const std::filesystem::path& path);
std::vector<Agent> read_agents_file(const std::filesystem::path& path);
std::vector<DocumentRecord> read_documents_file(const std::filesystem::path& path);

struct GraphEntry {
    std::string id;
    std::string name;
    std::optional<std::size_t> agents;  // declared counts, checked at load when present
    std::optional<std::size_t> edges;
};

struct Manifest {
    std::string name;
    std::vector<GraphEntry> graphs;
    std::string documents = "corpus/documents.jsonl";
    std::string embeddings = "corpus/embeddings.bin";
    std::string coords;  // empty when no precomputed projection ships
};

Manifest parse_manifest(std::string_view text, std::string_view source = "manifest.json");
std::string serialize_manifest(const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

// Dense float matrices: "EMB1", u32 count, u32 dim, count*dim f32, all little-endian.

Eigen::MatrixXd read_matrix_bin(const std::filesystem::path& path);
Eigen::MatrixXd decode_matrix_bin(std::string_view bytes, std::string_view source = "matrix");
std::string encode_matrix_bin(const Eigen::Ref<const Eigen::MatrixXd>& matrix);
void write_matrix_bin(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& matrix);

/// Writes `contents` verbatim, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace atlas::ingest
