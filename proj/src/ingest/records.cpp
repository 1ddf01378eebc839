#include "atlas/ingest/records.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "atlas/core/errors.hpp"

namespace atlas::ingest {

using nlohmann::json;

namespace {

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

// Reads required/optional members with typed errors; the caller turns the
// message into a ParseError with the line number.
struct FieldError {
    std::string reason;
};

const json& member(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw FieldError{std::string("missing field '") + key + "'"};
    return *it;
}

std::string string_field(const json& obj, const char* key) {
    const auto& value = member(obj, key);
    if (!value.is_string()) throw FieldError{std::string("field '") + key + "' must be a string"};
    return value.get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw FieldError{std::string("field '") + key + "' must be a string"};
    return it->get<std::string>();
}

double number_field(const json& obj, const char* key) {
    const auto& value = member(obj, key);
    if (!value.is_number()) throw FieldError{std::string("field '") + key + "' must be a number"};
    return value.get<double>();
}

int optional_int(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return 0;
    if (!it->is_number_integer()) throw FieldError{std::string("field '") + key + "' must be an integer"};
    return it->get<int>();
}

std::vector<std::string> string_list(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_array()) throw FieldError{std::string("field '") + key + "' must be an array"};
    std::vector<std::string> out;
    for (const auto& item : *it) {
        if (!item.is_string()) throw FieldError{std::string("field '") + key + "' must hold strings"};
        out.push_back(item.get<std::string>());
    }
    return out;
}

template <typename Record, typename Decode>
std::vector<Record> parse_lines(std::istream& in, std::string_view source, Decode decode) {
    std::vector<Record> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string(source), line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(std::string(source), line_no, "record must be a JSON object");
        try {
            out.push_back(decode(obj, out.size()));
        } catch (const FieldError& e) {
            throw ParseError(std::string(source), line_no, e.reason);
        }
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open file");
    return in;
}

}  // namespace

std::vector<CausalStatement> parse_statements(std::istream& in, std::string_view source) {
    return parse_lines<CausalStatement>(in, source, [](const json& obj, std::size_t) {
        CausalStatement st;
        st.id = string_field(obj, "id");
        const auto type_name = string_field(obj, "type");
        const auto type = statement_type_from_string(type_name);
        if (!type) throw FieldError{"unknown statement type '" + type_name + "'"};
        st.type = *type;
        st.subj = string_field(obj, "subj");
        st.obj = string_field(obj, "obj");
        st.belief = number_field(obj, "belief");
        if (!(st.belief >= 0.0 && st.belief <= 1.0)) throw FieldError{"belief must lie in [0, 1]"};
        const auto curated = obj.find("curated");
        if (curated != obj.end() && !curated->is_boolean()) throw FieldError{"field 'curated' must be a boolean"};
        st.curated = curated != obj.end() && curated->get<bool>();
        const auto& evidence = member(obj, "evidence");
        if (!evidence.is_array() || evidence.empty()) throw FieldError{"field 'evidence' must be a nonempty array"};
        for (const auto& item : evidence) {
            if (!item.is_object()) throw FieldError{"evidence items must be objects"};
            Evidence ev{string_field(item, "text"), optional_string(item, "doi"), optional_string(item, "source")};
            if (ev.text.empty()) throw FieldError{"evidence text must be nonempty"};
            st.evidence.push_back(std::move(ev));
        }
        if (st.id.empty()) throw FieldError{"statement id must be nonempty"};
        return st;
    });
}

std::string serialize_statement(const CausalStatement& st) {
    json evidence = json::array();
    for (const auto& ev : st.evidence) evidence.push_back({{"text", ev.text}, {"doi", ev.doi}, {"source", ev.source}});
    json obj = {{"id", st.id},           {"type", std::string(to_string(st.type))},
                {"subj", st.subj},       {"obj", st.obj},
                {"belief", st.belief},   {"curated", st.curated},
                {"evidence", evidence}};
    return obj.dump();
}

std::vector<Agent> parse_agents(std::istream& in, std::string_view source) {
    return parse_lines<Agent>(in, source, [](const json& obj, std::size_t) {
        Agent agent{string_field(obj, "id"), optional_string(obj, "name"), string_field(obj, "category"),
                    optional_string(obj, "description")};
        if (agent.id.empty()) throw FieldError{"agent id must be nonempty"};
        if (agent.name.empty()) agent.name = agent.id;
        try {
            split_category_path(agent.category_path);
        } catch (const FormatError& e) {
            throw FieldError{e.what()};
        }
        return agent;
    });
}

std::string serialize_agent(const Agent& agent) {
    json obj = {{"id", agent.id},
                {"name", agent.name},
                {"category", agent.category_path},
                {"description", agent.description}};
    return obj.dump();
}

std::vector<DocumentRecord> parse_documents(std::istream& in, std::string_view source) {
    return parse_lines<DocumentRecord>(in, source, [](const json& obj, std::size_t row) {
        DocumentRecord doc;
        doc.doi = string_field(obj, "doi");
        if (doc.doi.empty()) throw FieldError{"doi must be nonempty"};
        doc.title = optional_string(obj, "title");
        doc.authors = string_list(obj, "authors");
        doc.publisher = optional_string(obj, "publisher");
        doc.year = optional_int(obj, "year");
        doc.abstract_text = optional_string(obj, "abstract");
        doc.entities = string_list(obj, "entities");
        doc.artifacts.figures = optional_int(obj, "figures");
        doc.artifacts.tables = optional_int(obj, "tables");
        if (doc.artifacts.figures < 0 || doc.artifacts.tables < 0) throw FieldError{"artifact counts must be >= 0"};
        doc.row = row;
        return doc;
    });
}

std::string serialize_document(const DocumentRecord& doc) {
    json obj = {{"doi", doc.doi},
                {"title", doc.title},
                {"authors", doc.authors},
                {"publisher", doc.publisher},
                {"year", doc.year},
                {"abstract", doc.abstract_text},
                {"entities", doc.entities},
                {"figures", doc.artifacts.figures},
                {"tables", doc.artifacts.tables}};
    return obj.dump();
}

std::vector<CausalStatement> read_statements_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_statements(in, path.string());
}

std::vector<Agent> read_agents_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_agents(in, path.string());
}

std::vector<DocumentRecord> read_documents_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_documents(in, path.string());
}

Manifest parse_manifest(std::string_view text, std::string_view source) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(source), 0, std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!obj.is_object()) throw FieldError{"manifest must be an object"};
        Manifest m;
        m.name = optional_string(obj, "name");
        const auto& graphs = member(obj, "graphs");
        if (!graphs.is_array()) throw FieldError{"field 'graphs' must be an array"};
        for (const auto& g : graphs) {
            if (!g.is_object()) throw FieldError{"graph entries must be objects"};
            GraphEntry entry{string_field(g, "id"), optional_string(g, "name"), std::nullopt, std::nullopt};
            if (entry.id.empty()) throw FieldError{"graph id must be nonempty"};
            for (auto [key, slot] : {std::pair{"agents", &entry.agents}, std::pair{"edges", &entry.edges}}) {
                const auto it = g.find(key);
                if (it == g.end()) continue;
                if (!it->is_number_unsigned()) throw FieldError{std::string("graph '") + key + "' must be a count"};
                *slot = it->get<std::size_t>();
            }
            m.graphs.push_back(std::move(entry));
        }
        const auto& corpus = member(obj, "corpus");
        if (!corpus.is_object()) throw FieldError{"field 'corpus' must be an object"};
        m.documents = string_field(corpus, "documents");
        m.embeddings = string_field(corpus, "embeddings");
        m.coords = optional_string(corpus, "coords");
        return m;
    } catch (const FieldError& e) {
        throw ParseError(std::string(source), 0, e.reason);
    }
}

std::string serialize_manifest(const Manifest& m) {
    json graphs = json::array();
    for (const auto& g : m.graphs) {
        json entry{{"id", g.id}, {"name", g.name}};
        if (g.agents) entry["agents"] = *g.agents;
        if (g.edges) entry["edges"] = *g.edges;
        graphs.push_back(std::move(entry));
    }
    json corpus = {{"documents", m.documents}, {"embeddings", m.embeddings}};
    if (!m.coords.empty()) corpus["coords"] = m.coords;
    return json{{"name", m.name}, {"graphs", graphs}, {"corpus", corpus}}.dump(2) + "\n";
}

Manifest read_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path), path.string());
}

namespace {

constexpr std::string_view kMagic = "EMB1";

std::uint32_t load_u32(std::string_view bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(i)]);
    return v;
}

void store_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

}  // namespace

Eigen::MatrixXd decode_matrix_bin(std::string_view bytes, std::string_view source) {
    const std::string src(source);
    if (bytes.size() < 12 || bytes.substr(0, 4) != kMagic) throw ParseError(src, 0, "missing EMB1 header");
    const std::uint64_t count = load_u32(bytes, 4);
    const std::uint64_t dim = load_u32(bytes, 8);
    if (bytes.size() != 12 + count * dim * 4) {
        throw ParseError(src, 0,
                         "payload size " + std::to_string(bytes.size() - 12) + " does not match " +
                             std::to_string(count) + "x" + std::to_string(dim) + " floats");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    std::size_t at = 12;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c, at += 4) {
            m(r, c) = static_cast<double>(std::bit_cast<float>(load_u32(bytes, at)));
        }
    }
    return m;
}

std::string encode_matrix_bin(const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
    std::string out(kMagic);
    out.reserve(12 + static_cast<std::size_t>(matrix.size()) * 4);
    store_u32(out, static_cast<std::uint32_t>(matrix.rows()));
    store_u32(out, static_cast<std::uint32_t>(matrix.cols()));
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
            store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(matrix(r, c))));
        }
    }
    return out;
}

Eigen::MatrixXd read_matrix_bin(const std::filesystem::path& path) {
    return decode_matrix_bin(read_file(path), path.string());
}

void write_matrix_bin(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
    write_file(path, encode_matrix_bin(matrix));
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string(), ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

}  // namespace atlas::ingest
