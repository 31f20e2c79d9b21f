/*
 * Copyright 2026 The ConsentChain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CONSENTCHAIN_NODAL_HPP
#define CONSENTCHAIN_NODAL_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "consentchain/errors.hpp"
#include "consentchain/node.hpp"

namespace httplib {
class Server;
}

namespace consentchain::nodal {

/// Wire envelope: `{"ok":true,"payload":...}` or
/// `{"ok":false,"error":"Name","detail":"..."}`. The raw-chain block
/// route is the exception: it serves the canonical block record bytes
/// unwrapped so they re-hash to the committed block hash.
struct QueryResponse {
    int status = 200;
    std::string body;               // JSON, UTF-8
    bool raw = false;               // true for /chain/block/<h>
};

/// Read-only routing over one node's committed view. Routes:
///   GET /chain/block/<height>
///   GET /chain/verify
///   GET /state/<key>
///   GET /history/<key>
///   GET /analysis/aggregate?field=&decl=&now=[&requester=]
///   GET /consent/<subject>/<declaration_hash>[?at=]
///   GET /provenance/<key>
/// Every endpoint is a pure function of committed state. In
/// permissioned-read mode each request must carry the header
/// `X-Consentchain-Actor: <registered actor id>`.
class QueryService {
public:
    explicit QueryService(const node::Node& node) : node_(node) {}

    QueryResponse handle(const std::string& path,
                         const std::map<std::string, std::string>& params,
                         const std::optional<std::string>& actor_header) const;

private:
    const node::Node& node_;
};

struct AuditExport {
    std::string content;  // newline-delimited JSON, one object per transaction
    Hash256 digest;       // SHA-256 of content
    std::size_t lines = 0;
};

/// Exports every transaction (valid and invalid) in blocks
/// [from_height, to_height) for tamper-evident sharing.
Result<AuditExport> export_audit(const std::vector<ledger::Block>& blocks,
                                 std::int64_t from_height, std::int64_t to_height);
Result<AuditExport> export_audit(const node::Node& node, std::int64_t from_height,
                                 std::int64_t to_height);

/// HTTP/1.1 front end for QueryService (read-only; all mutations go
/// through the proposal path, never HTTP).
class HttpServer {
public:
    explicit HttpServer(const node::Node& node);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and serves on a background thread; port 0 picks one.
    /// Returns the bound port.
    Result<int> start(const std::string& host, int port = 0);
    /// Serves on the calling thread (CLI `serve`).
    bool listen_blocking(const std::string& host, int port);
    void stop();

private:
    void install_routes();

    const node::Node& node_;
    QueryService service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace consentchain::nodal

#endif
