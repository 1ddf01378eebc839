#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atlas {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed identifier, path, or value.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input text could not be parsed. `line` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& reason)
        : Error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + reason),
          source_(std::move(source)), line_(line), reason_(reason) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string source_;
    std::size_t line_;
    std::string reason_;
};

class AssemblyError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Lookup of an id (agent, category, graph, document) failed.
class UnknownEntityError : public Error {
public:
    explicit UnknownEntityError(std::string id)
        : Error("unknown entity '" + id + "'"), id_(std::move(id)) {}
    UnknownEntityError(std::string kind, std::string id)
        : Error("unknown " + kind + " '" + id + "'"), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(std::string path, const std::string& reason)
        : Error(path + ": " + reason), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace atlas
