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

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "consentchain/canonical.hpp"
#include "consentchain/consensus.hpp"
#include "consentchain/consent.hpp"
#include "consentchain/contracts.hpp"
#include "consentchain/identity.hpp"
#include "consentchain/ledger.hpp"
#include "consentchain/legalprose.hpp"
#include "consentchain/netconfig.hpp"
#include "consentchain/nodal.hpp"
#include "consentchain/node.hpp"
#include "consentchain/pipeline.hpp"
#include "consentchain/workload.hpp"

namespace cc = consentchain;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliState {
    std::string home = ".";
    bool json_output = false;
};

int fail(const CliState& cli, const cc::Error& error) {
    if (cli.json_output) {
        json body = {{"ok", false},
                     {"error", std::string(error.name())},
                     {"detail", error.detail}};
        std::cout << body.dump() << "\n";
    } else {
        std::cout << error.name() << "\n";
        if (!error.detail.empty()) std::cerr << error.detail << "\n";
    }
    return 1;
}

int emit(const CliState& cli, json payload, const std::string& text) {
    if (cli.json_output) {
        payload["ok"] = true;
        std::cout << payload.dump() << "\n";
    } else if (!text.empty()) {
        std::cout << text << "\n";
    }
    return 0;
}

cc::Result<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return cc::make_error(cc::ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// A declaration argument is either an .lprose file or a 64-hex hash.
struct DeclArg {
    std::optional<cc::prose::PurposeDeclaration> declaration;
    cc::Hash256 hash;
};

cc::Result<DeclArg> resolve_decl(const std::string& arg) {
    if (fs::exists(arg) && fs::is_regular_file(arg)) {
        auto text = read_file(arg);
        if (!text) return text.error();
        auto declaration = cc::prose::parse_declaration(text.value());
        if (!declaration) return declaration.error();
        DeclArg out;
        out.hash = cc::prose::hash_declaration(declaration.value());
        out.declaration = std::move(declaration).take();
        return out;
    }
    auto hash = cc::Hash256::from_hex(arg);
    if (!hash)
        return cc::make_error(cc::ErrorCode::BadParams,
                              arg + " is neither a declaration file nor a 64-hex hash");
    return DeclArg{std::nullopt, *hash};
}

/// Key arguments accept sugar:
///   consent:<subject>:<decl-file-or-hash>
///   decl:<decl-file-or-hash>
/// or a raw world-state key.
cc::Result<std::string> resolve_key(const cc::node::Node& node, const std::string& arg) {
    if (arg.rfind("consent:", 0) == 0) {
        std::string rest = arg.substr(8);
        std::size_t colon = rest.find(':');
        if (colon == std::string::npos)
            return cc::make_error(cc::ErrorCode::BadParams, "want consent:<subject>:<decl>");
        std::string subject = rest.substr(0, colon);
        auto decl = resolve_decl(rest.substr(colon + 1));
        if (!decl) return decl.error();
        if (node.registry().find(subject) == nullptr)
            return cc::make_error(cc::ErrorCode::UnknownActor, subject);
        return cc::contracts::consent_key(
            cc::identity::pseudonym(node.config().network_salt, subject), decl.value().hash);
    }
    if (arg.rfind("decl:", 0) == 0) {
        auto decl = resolve_decl(arg.substr(5));
        if (!decl) return decl.error();
        return cc::contracts::declaration_key(decl.value().hash);
    }
    return arg;
}

json mined_json(const std::vector<std::pair<std::int64_t, cc::Hash256>>& blocks) {
    json out = json::array();
    for (const auto& [height, hash] : blocks)
        out.push_back({{"height", height}, {"hash", hash.hex()}});
    return out;
}

/// Queue one gateway command and optionally mine. A prelude (the
/// auto-published declaration) is committed first on its own: proposals
/// simulate against committed state only, so the request cannot see a
/// merely-queued publication.
int run_proposal_command(const CliState& cli, const cc::workload::Event& event,
                         const std::optional<cc::workload::Event>& prelude, bool mine,
                         std::int64_t now) {
    auto node = cc::node::Node::open(cli.home);
    if (!node) return fail(cli, node.error());

    std::vector<std::string> tx_ids;
    json mined_blocks = json::array();
    auto push = [&](cc::workload::Event item) -> std::optional<cc::Error> {
        item.tick = now;
        auto tx = node.value().gateway().execute(item, node.value().chain());
        if (!tx) return tx.error();
        auto submitted = node.value().submit(std::move(tx).take());
        if (!submitted) return submitted.error();
        tx_ids.push_back(submitted.value());
        return std::nullopt;
    };
    auto mine_now = [&]() -> std::optional<cc::Error> {
        auto mined = node.value().mine(now);
        if (!mined) return mined.error();
        for (const auto& item : mined_json(mined.value())) mined_blocks.push_back(item);
        return std::nullopt;
    };

    if (prelude) {
        if (auto err = push(*prelude)) return fail(cli, *err);
        if (auto err = mine_now()) return fail(cli, *err);
    }
    if (auto err = push(event)) return fail(cli, *err);

    json payload = {{"tx_ids", tx_ids}};
    std::string text = "queued " + std::to_string(tx_ids.size()) + " tx";
    if (mine) {
        if (auto err = mine_now()) return fail(cli, *err);
        text += ", mined " + std::to_string(mined_blocks.size()) + " block(s)";
    }
    if (!mined_blocks.empty()) payload["mined"] = mined_blocks;
    return emit(cli, std::move(payload), text);
}

std::optional<cc::workload::Event> auto_publish_event(const cc::node::Node& node,
                                                      const DeclArg& decl,
                                                      const std::string& controller) {
    if (!decl.declaration) return std::nullopt;
    if (node.chain().state().find(cc::contracts::declaration_key(decl.hash)) != nullptr)
        return std::nullopt;
    cc::workload::Event event;
    event.actor = controller;
    event.command = "publish";
    event.args = {cc::prose::render_canonical(*decl.declaration)};
    return event;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consentchain: permissioned ledger with consent-first data governance"};
    app.require_subcommand(1);

    CliState cli;
    app.add_option("--home", cli.home, "node home directory (default .)");
    app.add_flag("--json", cli.json_output, "machine-readable output");

    // ----- id -----
    auto* id = app.add_subcommand("id", "membership registry");
    id->require_subcommand(1);

    std::string id_actor, id_org, id_roles, id_seed;
    auto* id_register = id->add_subcommand("register", "register an actor or organization");
    id_register->add_option("actor_id", id_actor)->required();
    id_register->add_option("--org", id_org, "parent organization id");
    id_register->add_option("--roles", id_roles,
                            "comma-separated roles; empty registers an organization");
    id_register->add_option("--seed", id_seed, "32-byte signing seed, hex (default: random)");

    auto* id_list = id->add_subcommand("list", "list registry records");

    // ----- prose -----
    auto* prose = app.add_subcommand("prose", "purpose declarations");
    prose->require_subcommand(1);
    std::string prose_file;
    auto* prose_check = prose->add_subcommand("check", "validate a declaration file");
    prose_check->add_option("file", prose_file)->required();
    auto* prose_hash = prose->add_subcommand("hash", "canonical hash of a declaration file");
    prose_hash->add_option("file", prose_file)->required();

    // ----- consent -----
    auto* consent_cmd = app.add_subcommand("consent", "consent lifecycle");
    consent_cmd->require_subcommand(1);
    std::string consent_subject, consent_decl, consent_controller;
    std::int64_t opt_now = -1;
    bool opt_mine = false;
    std::int64_t consent_at = -1;

    auto add_now_mine = [&](CLI::App* cmd) {
        cmd->add_option("--now", opt_now, "client timestamp (default: tip time + 1)");
        cmd->add_flag("--mine", opt_mine, "cut and commit immediately");
    };

    auto* consent_request = consent_cmd->add_subcommand("request", "controller asks for consent");
    consent_request->add_option("subject", consent_subject)->required();
    consent_request->add_option("decl", consent_decl)->required();
    consent_request->add_option("--controller", consent_controller)->required();
    add_now_mine(consent_request);

    auto* consent_grant = consent_cmd->add_subcommand("grant", "subject grants a pending request");
    consent_grant->add_option("subject", consent_subject)->required();
    consent_grant->add_option("decl", consent_decl)->required();
    add_now_mine(consent_grant);

    auto* consent_deny = consent_cmd->add_subcommand("deny", "subject denies a pending request");
    consent_deny->add_option("subject", consent_subject)->required();
    consent_deny->add_option("decl", consent_decl)->required();
    add_now_mine(consent_deny);

    auto* consent_revoke = consent_cmd->add_subcommand("revoke", "subject revokes a grant");
    consent_revoke->add_option("subject", consent_subject)->required();
    consent_revoke->add_option("decl", consent_decl)->required();
    add_now_mine(consent_revoke);

    auto* consent_status = consent_cmd->add_subcommand("status", "committed consent state");
    consent_status->add_option("subject", consent_subject)->required();
    consent_status->add_option("decl", consent_decl)->required();
    consent_status->add_option("--at", consent_at, "state as of this time");

    // ----- data -----
    auto* data = app.add_subcommand("data", "governed health-record pipeline");
    data->require_subcommand(1);
    std::string data_subject, data_decl, data_submitter, data_payload, data_supersedes;
    std::string data_field, data_requester, data_key;

    auto* data_submit = data->add_subcommand("submit", "submit a record under consent");
    data_submit->add_option("subject", data_subject)->required();
    data_submit->add_option("decl", data_decl)->required();
    data_submit->add_option("--submitter", data_submitter)->required();
    data_submit->add_option("--payload", data_payload, "field=value;field=value")->required();
    data_submit->add_option("--supersedes", data_supersedes,
                            "payload hash this record rectifies");
    add_now_mine(data_submit);

    auto* data_mine = data->add_subcommand("mine", "order and commit everything pending");
    data_mine->add_option("--now", opt_now, "block timestamp (default: tip time + 1)");

    auto* data_aggregate = data->add_subcommand("aggregate", "k-anonymous group counts");
    data_aggregate->add_option("field", data_field)->required();
    data_aggregate->add_option("decl", data_decl)->required();
    data_aggregate->add_option("--requester", data_requester)->required();
    data_aggregate->add_option("--now", opt_now, "query time (default: tip time)");

    auto* data_provenance = data->add_subcommand("provenance", "who touched a key, when");
    data_provenance->add_option("key", data_key, "state key or consent:/decl: sugar")->required();

    // ----- ledger -----
    auto* ledger_cmd = app.add_subcommand("ledger", "chain integrity and history");
    ledger_cmd->require_subcommand(1);
    std::string ledger_key;
    auto* ledger_verify = ledger_cmd->add_subcommand("verify", "re-derive and check the chain");
    auto* ledger_history = ledger_cmd->add_subcommand("history", "valid writes to a key");
    ledger_history->add_option("key", ledger_key)->required();

    // ----- net -----
    auto* net = app.add_subcommand("net", "simulated multi-peer network");
    net->require_subcommand(1);
    std::string net_workload;
    std::int64_t net_ticks = 0;
    auto* net_run = net->add_subcommand("run", "run a workload across all peers");
    net_run->add_option("workload", net_workload)->required();
    net_run->add_option("--ticks", net_ticks, "minimum ticks to simulate");

    // ----- serve -----
    auto* serve = app.add_subcommand("serve", "read-only query API over HTTP");
    std::string serve_addr;
    serve->add_option("--addr", serve_addr, "host:port (or CONSENTCHAIN_ADDR; default 127.0.0.1:7457)");

    // ----- audit -----
    auto* audit = app.add_subcommand("audit", "audit exports");
    audit->require_subcommand(1);
    std::int64_t audit_from = 0;
    std::int64_t audit_to = -1;
    std::string audit_out;
    auto* audit_export = audit->add_subcommand("export", "newline-delimited JSON of all txs");
    audit_export->add_option("--from", audit_from, "first height, inclusive (default 0)");
    audit_export->add_option("--to", audit_to, "end height, exclusive (default: tip + 1)");
    audit_export->add_option("--out", audit_out, "output file (default <home>/audit.ndjson)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    // ----- dispatch -----

    if (id_register->parsed()) {
        auto registry = fs::exists(fs::path(cli.home) / "registry.txt")
                            ? cc::identity::Registry::load_file(cli.home + "/registry.txt")
                            : cc::Result<cc::identity::Registry>(cc::identity::Registry{});
        if (!registry) return fail(cli, registry.error());

        cc::identity::Seed seed{};
        if (id_seed.empty()) {
            seed = cc::identity::random_seed();
        } else {
            auto bytes = cc::from_hex(id_seed);
            if (!bytes || bytes->size() != 32)
                return fail(cli, cc::make_error(cc::ErrorCode::BadParams, "--seed wants 64 hex"));
            std::copy(bytes->begin(), bytes->end(), seed.begin());
        }
        auto roles = cc::identity::roles_from_csv(id_roles);
        if (!roles) return fail(cli, roles.error());
        std::optional<std::string> org;
        if (!id_org.empty()) org = id_org;

        auto added = registry.value().register_actor(id_actor, org, roles.value(), seed);
        if (!added) return fail(cli, added.error());
        std::error_code ec;
        fs::create_directories(cli.home, ec);
        auto saved = registry.value().save_file(cli.home + "/registry.txt");
        if (!saved) return fail(cli, saved.error());
        return emit(cli, {{"actor", id_actor}}, "registered " + id_actor);
    }

    if (id_list->parsed()) {
        auto registry = cc::identity::Registry::load_file(cli.home + "/registry.txt");
        if (!registry) return fail(cli, registry.error());
        json actors = json::array();
        std::string text;
        for (const auto& actor : registry.value().actors()) {
            actors.push_back({{"actor_id", actor.actor_id},
                              {"org", actor.org_id ? json(*actor.org_id) : json(nullptr)},
                              {"roles", cc::identity::roles_to_csv(actor.roles)},
                              {"organization", actor.is_organization()},
                              {"active", actor.active}});
            text += actor.actor_id + " org=" + (actor.org_id ? *actor.org_id : "-") +
                    " roles=" + (actor.roles.empty() ? "-" : cc::identity::roles_to_csv(actor.roles)) +
                    (actor.active ? "" : " [deactivated]") + "\n";
        }
        if (!text.empty()) text.pop_back();
        return emit(cli, {{"actors", actors}}, text);
    }

    if (prose_check->parsed() || prose_hash->parsed()) {
        auto text = read_file(prose_file);
        if (!text) return fail(cli, text.error());
        auto declaration = cc::prose::parse_declaration(text.value());
        if (!declaration) return fail(cli, declaration.error());
        if (prose_check->parsed())
            return emit(cli, {{"id", declaration.value().declaration_id}}, "ok");
        return emit(cli, {{"hash", cc::prose::hash_declaration(declaration.value()).hex()}},
                    cc::prose::hash_declaration(declaration.value()).hex());
    }

    if (consent_request->parsed() || consent_grant->parsed() || consent_deny->parsed() ||
        consent_revoke->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto decl = resolve_decl(consent_decl);
        if (!decl) return fail(cli, decl.error());
        std::int64_t now = opt_now >= 0 ? opt_now : node.value().default_now();

        cc::workload::Event event;
        std::optional<cc::workload::Event> prelude;
        if (consent_request->parsed()) {
            event.actor = consent_controller;
            event.command = "consent.request";
            event.args = {consent_subject, decl.value().hash.hex()};
            prelude = auto_publish_event(node.value(), decl.value(), consent_controller);
        } else if (consent_revoke->parsed()) {
            event.actor = consent_subject;
            event.command = "consent.revoke";
            event.args = {decl.value().hash.hex()};
        } else {
            event.actor = consent_subject;
            event.command = "consent.respond";
            event.args = {decl.value().hash.hex(),
                          consent_grant->parsed() ? "grant" : "deny"};
        }
        return run_proposal_command(cli, event, prelude, opt_mine, now);
    }

    if (consent_status->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto decl = resolve_decl(consent_decl);
        if (!decl) return fail(cli, decl.error());
        if (node.value().registry().find(consent_subject) == nullptr)
            return fail(cli, cc::make_error(cc::ErrorCode::UnknownActor, consent_subject));

        cc::Hash256 pseudonym =
            cc::identity::pseudonym(node.value().config().network_salt, consent_subject);
        const auto* entry = node.value().chain().state().find(
            cc::contracts::consent_key(pseudonym, decl.value().hash));
        cc::consent::ConsentRecord record =
            cc::consent::ConsentRecord::initial("~" + pseudonym.hex(), decl.value().hash);
        if (entry != nullptr) {
            auto parsed = cc::consent::parse_record(entry->value);
            if (!parsed) return fail(cli, parsed.error());
            record = std::move(parsed).take();
        }
        cc::consent::ConsentState state = consent_at >= 0
                                              ? cc::consent::consent_status_at(record, consent_at)
                                              : record.state;
        json payload = {{"subject", consent_subject},
                        {"declaration", decl.value().hash.hex()},
                        {"state", std::string(cc::consent::state_name(state))}};
        if (record.granted_at) payload["granted_at"] = *record.granted_at;
        if (record.revoked_at) payload["revoked_at"] = *record.revoked_at;
        return emit(cli, std::move(payload), std::string(cc::consent::state_name(state)));
    }

    if (data_submit->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto decl = resolve_decl(data_decl);
        if (!decl) return fail(cli, decl.error());
        std::int64_t now = opt_now >= 0 ? opt_now : node.value().default_now();

        cc::workload::Event event;
        event.actor = data_submitter;
        event.command = "data.submit";
        event.args = {data_subject, decl.value().hash.hex(), data_payload};
        if (!data_supersedes.empty()) event.args.push_back(data_supersedes);
        return run_proposal_command(cli, event, std::nullopt, opt_mine, now);
    }

    if (data_mine->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        std::int64_t now = opt_now >= 0 ? opt_now : node.value().default_now();
        auto mined = node.value().mine(now);
        if (!mined) return fail(cli, mined.error());
        std::string text;
        for (const auto& [height, hash] : mined.value())
            text += "block " + std::to_string(height) + " " + hash.hex() + "\n";
        if (!text.empty()) text.pop_back();
        return emit(cli, {{"mined", mined_json(mined.value())}},
                    text.empty() ? "nothing pending" : text);
    }

    if (data_aggregate->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto decl = resolve_decl(data_decl);
        if (!decl) return fail(cli, decl.error());
        std::int64_t now = opt_now >= 0 ? opt_now : node.value().chain().tip().timestamp;
        auto counts = cc::pipeline::query_aggregate(node.value().pipeline_context(),
                                                    data_requester, data_field,
                                                    decl.value().hash, now);
        if (!counts) return fail(cli, counts.error());
        json groups = json::object();
        std::string text;
        for (const auto& [group, count] : counts.value()) {
            groups[group] = count;
            text += group + ": " + std::to_string(count) + "\n";
        }
        if (!text.empty()) text.pop_back();
        return emit(cli, {{"groups", groups}}, text.empty() ? "{}" : text);
    }

    if (data_provenance->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto key = resolve_key(node.value(), data_key);
        if (!key) return fail(cli, key.error());
        auto entries =
            cc::pipeline::provenance_of(node.value().pipeline_context(), "", key.value());
        if (!entries) return fail(cli, entries.error());
        json list = json::array();
        std::string text;
        for (const auto& entry : entries.value()) {
            list.push_back({{"actor", entry.actor},
                            {"action", entry.action},
                            {"block_timestamp", entry.block_timestamp},
                            {"validation_code",
                             std::string(cc::ledger::validation_code_name(entry.validation_code))},
                            {"tx_id", entry.tx_id}});
            text += entry.actor + " " + entry.action + " t=" +
                    std::to_string(entry.block_timestamp) + " " +
                    std::string(cc::ledger::validation_code_name(entry.validation_code)) + "\n";
        }
        if (!text.empty()) text.pop_back();
        return emit(cli, {{"entries", list}}, text);
    }

    if (ledger_verify->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto report = node.value().chain().verify(node.value().commit_context());
        if (report.ok) return emit(cli, {{"verified", true}}, "ok");
        if (cli.json_output) {
            json body = {{"ok", false},
                         {"error", "BrokenLink"},
                         {"first_bad_height", report.first_bad_height},
                         {"reason", report.reason}};
            std::cout << body.dump() << "\n";
        } else {
            std::cout << "BrokenLink\n";
            std::cerr << "first bad height " << report.first_bad_height << ": " << report.reason
                      << "\n";
        }
        return 1;
    }

    if (ledger_history->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        auto key = resolve_key(node.value(), ledger_key);
        if (!key) return fail(cli, key.error());
        auto entries = node.value().chain().history(key.value());
        json list = json::array();
        std::string text;
        for (const auto& entry : entries) {
            list.push_back({{"tx_id", entry.tx_id},
                            {"creator", entry.creator},
                            {"block_timestamp", entry.block_timestamp},
                            {"value", cc::to_hex(entry.value)}});
            text += entry.tx_id.substr(0, 12) + " " + entry.creator + " t=" +
                    std::to_string(entry.block_timestamp) + "\n";
        }
        if (!text.empty()) text.pop_back();
        return emit(cli, {{"entries", list}}, text);
    }

    if (net_run->parsed()) {
        auto registry = cc::identity::Registry::load_file(cli.home + "/registry.txt");
        if (!registry) return fail(cli, registry.error());
        auto config = cc::NetworkConfig::load_file(cli.home + "/network.conf");
        if (!config) return fail(cli, config.error());

        auto text = read_file(net_workload);
        if (!text) return fail(cli, text.error());
        fs::path base = fs::path(net_workload).parent_path();
        auto load = cc::workload::parse_workload(text.value(), [&](const std::string& ref) {
            return read_file((base / ref).string());
        });
        if (!load) return fail(cli, load.error());

        auto outcome = cc::consensus::run_network_round(
            cc::consensus::NetworkTopology::from_config(config.value()), config.value(),
            registry.value(), load.value(), net_ticks);

        json peers = json::array();
        std::string out_text;
        for (const auto& peer : outcome.peers) {
            peers.push_back({{"peer", peer.peer_id},
                             {"chain", peer.chain_hash.hex()},
                             {"state", peer.state_digest.hex()}});
            out_text += "peer " + peer.peer_id + " chain=" + peer.chain_hash.hex() +
                        " state=" + peer.state_digest.hex() + "\n";
        }
        json rejections = json::array();
        for (const auto& [index, name] : outcome.rejections)
            rejections.push_back({{"event", index}, {"error", name}});
        out_text += "blocks=" + std::to_string(outcome.blocks_cut) +
                    " txs=" + std::to_string(outcome.txs_committed) +
                    " rejections=" + std::to_string(outcome.rejections.size());
        return emit(cli,
                    {{"peers", peers},
                     {"blocks", outcome.blocks_cut},
                     {"txs", outcome.txs_committed},
                     {"rejections", rejections}},
                    out_text);
    }

    if (serve->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        std::string addr = serve_addr;
        if (addr.empty()) {
            if (const char* env = std::getenv("CONSENTCHAIN_ADDR")) addr = env;
        }
        if (addr.empty()) addr = "127.0.0.1:7457";
        std::size_t colon = addr.rfind(':');
        if (colon == std::string::npos)
            return fail(cli, cc::make_error(cc::ErrorCode::BadParams, "--addr wants host:port"));
        std::string host = addr.substr(0, colon);
        auto port = cc::parse_int64(addr.substr(colon + 1));
        if (!port || *port < 1 || *port > 65535)
            return fail(cli, cc::make_error(cc::ErrorCode::BadParams, "bad port"));

        cc::nodal::HttpServer server(node.value());
        std::cerr << "serving on " << host << ":" << *port << "\n";
        if (!server.listen_blocking(host, static_cast<int>(*port)))
            return fail(cli, cc::make_error(cc::ErrorCode::IoError, "listen failed on " + addr));
        return 0;
    }

    if (audit_export->parsed()) {
        auto node = cc::node::Node::open(cli.home);
        if (!node) return fail(cli, node.error());
        std::int64_t to = audit_to >= 0 ? audit_to : node.value().chain().height() + 1;
        auto exported = cc::nodal::export_audit(node.value(), audit_from, to);
        if (!exported) return fail(cli, exported.error());
        std::string out_path =
            audit_out.empty() ? cli.home + "/audit.ndjson" : audit_out;
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out)
            return fail(cli, cc::make_error(cc::ErrorCode::IoError, "cannot write " + out_path));
        out << exported.value().content;
        out.close();
        return emit(cli,
                    {{"file", out_path},
                     {"lines", exported.value().lines},
                     {"digest", exported.value().digest.hex()}},
                    "digest " + exported.value().digest.hex() + " lines " +
                        std::to_string(exported.value().lines) + " file " + out_path);
    }

    std::cerr << "no command\n";
    return 2;
}
