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

#include "consentchain/node.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "consentchain/canonical.hpp"
#include "consentchain/consent.hpp"
#include "consentchain/legalprose.hpp"

namespace consentchain::node {

namespace fs = std::filesystem;

namespace {

Result<pipeline::Payload> payload_from_spec(const std::string& spec) {
    pipeline::Payload payload;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t split = spec.find(';', start);
        std::string item = split == std::string::npos ? spec.substr(start)
                                                      : spec.substr(start, split - start);
        start = split == std::string::npos ? spec.size() + 1 : split + 1;
        if (trim(item).empty()) continue;
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            return make_error(ErrorCode::BadParams, "payload item: " + item);
        std::string field = trim(item.substr(0, eq));
        std::string value = item.substr(eq + 1);
        if (!is_valid_field_name(field)) return make_error(ErrorCode::BadFieldName, field);
        if (payload.count(field) != 0) return make_error(ErrorCode::DuplicateKey, field);
        payload.emplace(std::move(field), std::move(value));
    }
    if (payload.empty()) return make_error(ErrorCode::BadParams, "empty payload");
    return payload;
}

}  // namespace

Result<ledger::Transaction> Gateway::endorse(const contracts::TxProposal& proposal,
                                             const ledger::Ledger& view) const {
    pseudonyms_.refresh(registry_);

    auto creator_id = pseudonyms_.resolve(proposal.creator);
    if (!creator_id) return make_error(ErrorCode::UnknownActor, proposal.creator);
    const identity::Credential* creator_cred = registry_.credential(*creator_id);
    if (creator_cred == nullptr) return make_error(ErrorCode::UnknownActor, *creator_id);

    contracts::ContractContext context{registry_, pseudonyms_, config_.network_salt, &store_};
    auto rwset = contracts::simulate_proposal(proposal, view.state(), context);
    if (!rwset) return rwset.error();

    Hash256 creator_sig =
        registry_.scheme().sign(*creator_cred, contracts::canonical_proposal_bytes(proposal));

    std::vector<contracts::Endorsement> endorsements;
    for (const auto& endorser : config_.policy.endorser_set) {
        const identity::Credential* cred = registry_.credential(endorser);
        if (cred == nullptr) continue;
        endorsements.push_back(
            contracts::endorse(*cred, proposal.proposal_id, rwset.value()));
    }
    if (endorsements.empty())
        return make_error(ErrorCode::NotEndorsed, "no endorser credentials available");

    return ledger::make_transaction(proposal, creator_sig, std::move(rwset).take(),
                                    std::move(endorsements));
}

Result<contracts::TxProposal> Gateway::build_proposal(const workload::Event& event,
                                                      const ledger::Ledger& view) {
    pseudonyms_.refresh(registry_);
    const identity::Actor* actor = registry_.find(event.actor);
    if (actor == nullptr) return make_error(ErrorCode::UnknownActor, event.actor);

    std::string proposal_id = "p" + std::to_string(++proposal_seq_);
    std::string creator_ref = identity::onchain_ref(*actor, config_.network_salt);

    auto expect_args = [&](std::size_t min_count, std::size_t max_count) -> std::optional<Error> {
        if (event.args.size() < min_count || event.args.size() > max_count)
            return make_error(ErrorCode::BadParams,
                              event.command + ": wrong argument count");
        return std::nullopt;
    };

    contracts::TxProposal proposal;
    proposal.proposal_id = std::move(proposal_id);
    proposal.creator = creator_ref;
    proposal.client_timestamp = event.tick;

    if (event.command == "publish") {
        if (auto err = expect_args(1, 1)) return *err;
        auto declaration = prose::parse_declaration(event.args[0]);
        if (!declaration) return declaration.error();
        proposal.contract = contracts::ContractName::Consent;
        proposal.action = "publish_declaration";
        proposal.args = {prose::render_canonical(declaration.value())};
        return proposal;
    }

    if (event.command == "consent.request") {
        if (auto err = expect_args(2, 2)) return *err;
        const identity::Actor* subject = registry_.find(event.args[0]);
        if (subject == nullptr) return make_error(ErrorCode::UnknownActor, event.args[0]);
        proposal.contract = contracts::ContractName::Consent;
        proposal.action = "request";
        proposal.args = {identity::onchain_ref(*subject, config_.network_salt), event.args[1]};
        return proposal;
    }

    if (event.command == "consent.respond") {
        // [decl, decision] answers for oneself; [subject, decl, decision]
        // names the record explicitly (the contract then enforces that
        // only the subject may answer).
        if (auto err = expect_args(2, 3)) return *err;
        proposal.contract = contracts::ContractName::Consent;
        proposal.action = "respond";
        if (event.args.size() == 2) {
            proposal.args = {creator_ref, event.args[0], event.args[1]};
        } else {
            const identity::Actor* subject = registry_.find(event.args[0]);
            if (subject == nullptr) return make_error(ErrorCode::UnknownActor, event.args[0]);
            proposal.args = {identity::onchain_ref(*subject, config_.network_salt),
                             event.args[1], event.args[2]};
        }
        return proposal;
    }

    if (event.command == "consent.revoke") {
        if (auto err = expect_args(1, 2)) return *err;
        proposal.contract = contracts::ContractName::Consent;
        proposal.action = "revoke";
        if (event.args.size() == 1) {
            proposal.args = {creator_ref, event.args[0]};
        } else {
            const identity::Actor* subject = registry_.find(event.args[0]);
            if (subject == nullptr) return make_error(ErrorCode::UnknownActor, event.args[0]);
            proposal.args = {identity::onchain_ref(*subject, config_.network_salt),
                             event.args[1]};
        }
        return proposal;
    }

    if (event.command == "data.submit") {
        if (auto err = expect_args(3, 4)) return *err;
        auto declaration_hash = Hash256::from_hex(event.args[1]);
        if (!declaration_hash)
            return make_error(ErrorCode::BadParams, "declaration hash: " + event.args[1]);
        const auto* entry = view.state().find(contracts::declaration_key(*declaration_hash));
        if (entry == nullptr)
            return make_error(ErrorCode::UnknownKey,
                              "declaration not published: " + event.args[1]);
        auto declaration = prose::parse_declaration(entry->value);
        if (!declaration) return declaration.error();
        auto payload = payload_from_spec(event.args[2]);
        if (!payload) return payload.error();
        std::optional<Hash256> supersedes;
        if (event.args.size() == 4 && event.args[3] != "-") {
            supersedes = Hash256::from_hex(event.args[3]);
            if (!supersedes)
                return make_error(ErrorCode::BadParams, "supersedes: " + event.args[3]);
        }
        pipeline::PipelineContext context{registry_, pseudonyms_, config_, view, store_};
        return pipeline::submit_health_record(context, event.actor, event.args[0],
                                              declaration.value(), payload.value(), event.tick,
                                              proposal.proposal_id, supersedes);
    }

    if (event.command == "audit.history") {
        if (auto err = expect_args(1, 1)) return *err;
        proposal.contract = contracts::ContractName::Audit;
        proposal.action = "history";
        proposal.args = {event.args[0]};
        return proposal;
    }

    if (event.command == "register_actor") {
        if (auto err = expect_args(1, 1)) return *err;
        const identity::Actor* target = registry_.find(event.args[0]);
        if (target == nullptr) return make_error(ErrorCode::UnknownActor, event.args[0]);
        proposal.contract = contracts::ContractName::Consent;
        proposal.action = "register_actor";
        proposal.args = {identity::onchain_ref(*target, config_.network_salt),
                         target->org_id ? *target->org_id : "-",
                         identity::roles_to_csv(target->roles), target->public_tag.hex()};
        return proposal;
    }

    // Any other dotted action drives the named contract with the args
    // passed through verbatim (refs must already be on-chain form).
    if (event.command.find('.') != std::string::npos) {
        auto parsed = contracts::parse_action(event.command);
        if (!parsed) return parsed.error();
        proposal.contract = parsed.value().first;
        proposal.action = parsed.value().second;
        proposal.args = event.args;
        return proposal;
    }

    return make_error(ErrorCode::UnknownAction, event.command);
}

Result<ledger::Transaction> Gateway::execute(const workload::Event& event,
                                             const ledger::Ledger& view) {
    auto proposal = build_proposal(event, view);
    if (!proposal) return proposal.error();
    return endorse(proposal.value(), view);
}

void post_commit(const ledger::Ledger& ledger, const ledger::Block& block,
                 pipeline::OffchainStore& store) {
    pipeline::apply_erasure_hooks(ledger, block, store);
}

Result<Node> Node::open(const std::string& home) {
    std::error_code ec;
    fs::create_directories(home, ec);
    if (ec) return make_error(ErrorCode::IoError, "cannot create " + home);

    Node node;
    node.paths_ = NodePaths{home};

    auto registry = identity::Registry::load_file(node.paths_.registry_file());
    if (!registry) return registry.error();
    node.registry_ = std::make_unique<identity::Registry>(std::move(registry).take());

    auto config = NetworkConfig::load_file(node.paths_.network_file());
    if (!config) return config.error();
    node.config_ = std::make_unique<NetworkConfig>(std::move(config).take());

    node.pseudonyms_ =
        std::make_unique<identity::PseudonymTable>(node.config_->network_salt);
    node.pseudonyms_->refresh(*node.registry_);

    auto chain = ledger::Ledger::open(node.paths_.chain_file());
    if (!chain) return chain.error();
    node.ledger_ = std::make_unique<ledger::Ledger>(std::move(chain).take());

    auto store = pipeline::OffchainStore::open(node.paths_.store_dir());
    if (!store) return store.error();
    node.store_ = std::make_unique<pipeline::OffchainStore>(std::move(store).take());
    // A crash can land between a commit and its erasure hook; replaying
    // the whole-chain rule at startup closes that window.
    pipeline::reconcile_erasures(node.ledger_->blocks(), *node.store_);

    node.gateway_ = std::make_unique<Gateway>(*node.registry_, *node.pseudonyms_,
                                              *node.config_, *node.store_);

    // Reload the pending queue, if any.
    std::ifstream in(node.paths_.pending_file(), std::ios::binary);
    if (in) {
        std::ostringstream buffer;
        buffer << in.rdbuf();
        std::string text = buffer.str();
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) break;
            auto length = parse_int64(text.substr(pos, eol - pos));
            if (!length || *length < 0)
                return make_error(ErrorCode::IoError, "bad pending.log length prefix");
            std::size_t start = eol + 1;
            if (start + static_cast<std::size_t>(*length) > text.size())
                return make_error(ErrorCode::IoError, "truncated pending.log record");
            auto tx = ledger::tx_from_json(text.substr(start, *length));
            if (!tx) return tx.error();
            node.pending_.push_back(std::move(tx).take());
            pos = start + *length;
            if (pos < text.size() && text[pos] == '\n') ++pos;
        }
    }

    // Proposal ids must stay unique across restarts.
    std::int64_t seen = 0;
    for (const auto& block : node.ledger_->blocks()) {
        seen += static_cast<std::int64_t>(block.txs.size());
    }
    seen += static_cast<std::int64_t>(node.pending_.size());
    node.gateway_->set_proposal_seq(seen);

    return node;
}

ledger::CommitContext Node::commit_context() const {
    return ledger::CommitContext{*registry_, *pseudonyms_, config_->policy};
}

pipeline::PipelineContext Node::pipeline_context() const {
    return pipeline::PipelineContext{*registry_, *pseudonyms_, *config_, *ledger_, *store_};
}

Result<std::string> Node::submit(ledger::Transaction tx) {
    if (tx.endorsements.empty()) return make_error(ErrorCode::NotEndorsed, tx.tx_id);
    if (ledger_->has_tx(tx.tx_id)) return make_error(ErrorCode::DuplicateTx, tx.tx_id);
    for (const auto& queued : pending_) {
        if (queued.tx_id == tx.tx_id) return make_error(ErrorCode::DuplicateTx, tx.tx_id);
    }
    std::string tx_id = tx.tx_id;
    pending_.push_back(std::move(tx));
    auto saved = save_pending();
    if (!saved) return saved.error();
    return tx_id;
}

Result<std::vector<std::pair<std::int64_t, Hash256>>> Node::mine(std::int64_t now) {
    std::vector<std::pair<std::int64_t, Hash256>> out;
    if (pending_.empty()) return out;
    if (now < ledger_->tip().timestamp)
        return make_error(ErrorCode::BadParams,
                          "mining time " + std::to_string(now) + " precedes the chain tip");

    pseudonyms_->refresh(*registry_);
    consensus::Orderer orderer(
        consensus::OrdererConfig{config_->batch_size, config_->batch_timeout_ticks},
        *registry_, *pseudonyms_);
    orderer.anchor(ledger_->height(), ledger_->tip_hash());
    for (const auto& block : ledger_->blocks()) {
        for (const auto& tx : block.txs) orderer.mark_seen(tx.tx_id);
    }

    for (auto& tx : pending_) {
        auto accepted = orderer.submit(std::move(tx), now);
        if (!accepted) return accepted.error();
    }
    pending_.clear();

    ledger::CommitContext context = commit_context();
    // Mining flushes the whole queue, partial final batch included.
    while (auto block = orderer.cut_block(now, /*force=*/true)) {
        auto codes = ledger_->commit_block(*block, context);
        if (!codes) return codes.error();
        post_commit(*ledger_, ledger_->tip(), *store_);
        out.emplace_back(ledger_->height(), ledger_->tip_hash());
    }

    auto saved = save_pending();
    if (!saved) return saved.error();
    return out;
}

Status Node::save_pending() const {
    std::ofstream out(paths_.pending_file(), std::ios::binary | std::ios::trunc);
    if (!out) return make_error(ErrorCode::IoError, "cannot write pending.log");
    for (const auto& tx : pending_) {
        std::string record = ledger::tx_to_json(tx);
        out << record.size() << "\n" << record << "\n";
    }
    return ok_status();
}

}  // namespace consentchain::node

namespace consentchain::workload {

Result<Workload> parse_workload(
    std::string_view text,
    const std::function<Result<std::string>(const std::string&)>& load_file) {
    Workload load;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = trim(eol == std::string_view::npos ? text.substr(pos)
                                                              : text.substr(pos, eol - pos));
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '|') {
                parts.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (parts.size() < 3)
            return make_error(ErrorCode::BadParams,
                              "workload line " + std::to_string(line_no) +
                                  ": want tick|actor|command");
        auto tick = parse_int64(parts[0]);
        if (!tick || *tick < 0)
            return make_error(ErrorCode::BadParams,
                              "workload line " + std::to_string(line_no) + ": bad tick");

        Event event;
        event.tick = *tick;
        event.actor = parts[1];
        event.command = parts[2];
        event.args.assign(parts.begin() + 3, parts.end());

        if (event.command == "publish") {
            if (event.args.size() != 1)
                return make_error(ErrorCode::BadParams,
                                  "workload line " + std::to_string(line_no) +
                                      ": publish wants a declaration file");
            std::string path = event.args[0];
            if (!path.empty() && path.front() == '@') path.erase(0, 1);
            auto loaded = load_file(path);
            if (!loaded) return loaded.error();
            event.args[0] = std::move(loaded).take();
        } else {
            // `@<path>` anywhere else means "hash of that declaration".
            for (auto& arg : event.args) {
                if (arg.empty() || arg.front() != '@') continue;
                auto loaded = load_file(arg.substr(1));
                if (!loaded) return loaded.error();
                auto declaration = prose::parse_declaration(loaded.value());
                if (!declaration) return declaration.error();
                arg = prose::hash_declaration(declaration.value()).hex();
            }
        }
        load.events.push_back(std::move(event));
    }
    return load;
}

}  // namespace consentchain::workload
