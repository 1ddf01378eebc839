#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "atlas/server/dataset.hpp"

namespace atlas::server {

inline constexpr const char* kVersionHeader = "X-Dataset-Version";

struct Request {
    std::string method = "GET";
    std::string path;                           // already percent-decoded
    std::map<std::string, std::string> query;   // decoded parameters
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Stateless request handler over an immutable Dataset; safe to call from
/// several threads at once.
class Api {
public:
    explicit Api(const Dataset& dataset) : dataset_(dataset) {}

    Response handle(const Request& request) const;

private:
    const Dataset& dataset_;
};

struct ServeConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;
};

/// HTTP front end over Api. Binding happens in the constructor (port 0 picks a
/// free port); run() blocks until stop() is called from another thread.
class HttpServer {
public:
    /// Throws IoError when the port cannot be bound.
    HttpServer(const Dataset& dataset, const ServeConfig& config);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    int port() const noexcept { return port_; }
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

/// Blocks serving HTTP until the process stops.
void serve(const Dataset& dataset, const ServeConfig& config);

}  // namespace atlas::server
