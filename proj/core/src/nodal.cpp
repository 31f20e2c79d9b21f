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

#include "consentchain/nodal.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "consentchain/canonical.hpp"
#include "consentchain/consent.hpp"
#include "consentchain/pipeline.hpp"

namespace consentchain::nodal {

using nlohmann::json;

namespace {

QueryResponse error_response(int status, std::string_view name, const std::string& detail) {
    json body = {{"ok", false}, {"error", std::string(name)}, {"detail", detail}};
    return QueryResponse{status, body.dump(), false};
}

QueryResponse error_response(int status, const Error& error) {
    return error_response(status, error.name(), error.detail);
}

QueryResponse ok_response(json payload) {
    json body = {{"ok", true}, {"payload", std::move(payload)}};
    return QueryResponse{200, body.dump(), false};
}

std::optional<std::string> route_suffix(const std::string& path, std::string_view prefix) {
    if (path.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    std::string suffix = path.substr(prefix.size());
    if (suffix.empty()) return std::nullopt;
    return suffix;
}

}  // namespace

QueryResponse QueryService::handle(const std::string& path,
                                   const std::map<std::string, std::string>& params,
                                   const std::optional<std::string>& actor_header) const {
    // Permissioned-read gate: a registered actor id header, no session
    // layer (documented non-goal).
    if (node_.config().read_mode == ReadMode::Permissioned) {
        if (!actor_header)
            return error_response(401, "BadParams", "X-Consentchain-Actor header required");
        if (node_.registry().find(*actor_header) == nullptr)
            return error_response(403, "UnknownActor", *actor_header);
    }

    const ledger::Ledger& chain = node_.chain();

    if (auto height_text = route_suffix(path, "/chain/block/")) {
        auto height = parse_int64(*height_text);
        if (!height || *height < 0 ||
            *height > chain.height())
            return error_response(400, "BadParams", "height " + *height_text);
        return QueryResponse{
            200, ledger::block_to_json(chain.blocks()[static_cast<std::size_t>(*height)]), true};
    }

    if (path == "/chain/verify") {
        auto report = chain.verify(node_.commit_context());
        json payload = {{"ok", report.ok}};
        if (!report.ok) {
            payload["first_bad_height"] = report.first_bad_height;
            payload["reason"] = report.reason;
        }
        return ok_response(std::move(payload));
    }

    if (auto key = route_suffix(path, "/state/")) {
        const auto* entry = chain.state().find(*key);
        if (entry == nullptr) return error_response(404, "UnknownKey", *key);
        return ok_response(json{{"key", *key},
                                {"value", to_hex(entry->value)},
                                {"height", entry->version.height},
                                {"tx_index", entry->version.tx_index}});
    }

    if (auto key = route_suffix(path, "/history/")) {
        auto entries = chain.history(*key);
        json payload = json::array();
        for (const auto& entry : entries) {
            payload.push_back({{"tx_id", entry.tx_id},
                               {"creator", entry.creator},
                               {"block_timestamp", entry.block_timestamp},
                               {"value", to_hex(entry.value)}});
        }
        return ok_response(std::move(payload));
    }

    if (path == "/analysis/aggregate") {
        auto field = params.find("field");
        auto decl = params.find("decl");
        if (field == params.end() || decl == params.end())
            return error_response(400, "BadParams", "field and decl are required");
        auto declaration_hash = Hash256::from_hex(decl->second);
        if (!declaration_hash) return error_response(400, "BadParams", "decl hash");
        std::int64_t now = chain.tip().timestamp;
        if (auto at = params.find("now"); at != params.end()) {
            auto parsed = parse_int64(at->second);
            if (!parsed) return error_response(400, "BadParams", "now");
            now = *parsed;
        }
        std::string requester;
        if (actor_header) {
            requester = *actor_header;
        } else if (auto param = params.find("requester"); param != params.end()) {
            requester = param->second;
        } else {
            return error_response(400, "BadParams", "requester is required");
        }
        auto counts = pipeline::query_aggregate(node_.pipeline_context(), requester,
                                                field->second, *declaration_hash, now);
        if (!counts) return error_response(400, counts.error());
        json payload = json::object();
        for (const auto& [group, count] : counts.value()) payload[group] = count;
        return ok_response(std::move(payload));
    }

    if (auto suffix = route_suffix(path, "/consent/")) {
        std::size_t slash = suffix->find('/');
        if (slash == std::string::npos)
            return error_response(400, "BadParams", "want /consent/<subject>/<declaration>");
        std::string subject = suffix->substr(0, slash);
        auto declaration_hash = Hash256::from_hex(suffix->substr(slash + 1));
        if (!declaration_hash) return error_response(400, "BadParams", "declaration hash");

        // Accept a raw registered subject id or a pseudonym hex.
        Hash256 pseudonym;
        if (auto direct = Hash256::from_hex(subject);
            direct && node_.registry().find(subject) == nullptr) {
            pseudonym = *direct;
        } else {
            const auto* actor = node_.registry().find(subject);
            if (actor == nullptr) return error_response(404, "UnknownActor", subject);
            pseudonym = identity::pseudonym(node_.config().network_salt, actor->actor_id);
        }

        const auto* entry =
            chain.state().find(contracts::consent_key(pseudonym, *declaration_hash));
        consent::ConsentRecord record =
            consent::ConsentRecord::initial("~" + pseudonym.hex(), *declaration_hash);
        if (entry != nullptr) {
            auto parsed = consent::parse_record(entry->value);
            if (!parsed) return error_response(500, parsed.error());
            record = parsed.value();
        }
        std::int64_t at = chain.tip().timestamp;
        bool has_at = false;
        if (auto param = params.find("at"); param != params.end()) {
            auto parsed = parse_int64(param->second);
            if (!parsed) return error_response(400, "BadParams", "at");
            at = *parsed;
            has_at = true;
        }
        consent::ConsentState state =
            has_at ? consent::consent_status_at(record, at) : record.state;
        json payload = {{"subject", record.subject},
                        {"declaration", record.declaration_hash.hex()},
                        {"state", std::string(consent::state_name(state))}};
        if (record.granted_at) payload["granted_at"] = *record.granted_at;
        if (record.revoked_at) payload["revoked_at"] = *record.revoked_at;
        return ok_response(std::move(payload));
    }

    if (auto key = route_suffix(path, "/provenance/")) {
        auto entries = pipeline::provenance_of(node_.pipeline_context(), "", *key);
        if (!entries) return error_response(404, entries.error());
        json payload = json::array();
        for (const auto& entry : entries.value()) {
            payload.push_back(
                {{"actor", entry.actor},
                 {"action", entry.action},
                 {"block_timestamp", entry.block_timestamp},
                 {"validation_code",
                  std::string(ledger::validation_code_name(entry.validation_code))},
                 {"tx_id", entry.tx_id}});
        }
        return ok_response(std::move(payload));
    }

    return error_response(404, "UnknownRoute", path);
}

Result<AuditExport> export_audit(const node::Node& node, std::int64_t from_height,
                                 std::int64_t to_height) {
    return export_audit(node.chain().blocks(), from_height, to_height);
}

Result<AuditExport> export_audit(const std::vector<ledger::Block>& blocks,
                                 std::int64_t from_height, std::int64_t to_height) {
    if (from_height < 0 || from_height > to_height ||
        to_height > static_cast<std::int64_t>(blocks.size()))
        return make_error(ErrorCode::BadRange,
                          "[" + std::to_string(from_height) + "," + std::to_string(to_height) +
                              ") over height " + std::to_string(blocks.size() - 1));
    AuditExport out;
    for (std::int64_t h = from_height; h < to_height; ++h) {
        const auto& block = blocks[static_cast<std::size_t>(h)];
        for (const auto& tx : block.txs) {
            json line = {{"height", block.height},
                         {"timestamp", block.timestamp},
                         {"tx_id", tx.tx_id},
                         {"creator", tx.proposal.creator},
                         {"contract", std::string(contracts::contract_name(tx.proposal.contract))},
                         {"action", tx.proposal.action},
                         {"validation_code",
                          std::string(ledger::validation_code_name(
                              tx.validation_code.value_or(ledger::ValidationCode::PolicyFailure)))}};
            out.content += line.dump();
            out.content += "\n";
            ++out.lines;
        }
    }
    out.digest = sha256(out.content);
    return out;
}

HttpServer::HttpServer(const node::Node& node)
    : node_(node), service_(node), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
    server_->Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [key, value] : req.params) params[key] = value;
        std::optional<std::string> actor;
        if (req.has_header("X-Consentchain-Actor"))
            actor = req.get_header_value("X-Consentchain-Actor");
        QueryResponse out = service_.handle(req.path, params, actor);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    });
}

Result<int> HttpServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
        if (bound <= 0) return make_error(ErrorCode::IoError, "cannot bind " + host);
    } else if (!server_->bind_to_port(host, port)) {
        return make_error(ErrorCode::IoError,
                          "cannot bind " + host + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

bool HttpServer::listen_blocking(const std::string& host, int port) {
    return server_->listen(host, port);
}

void HttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace consentchain::nodal
