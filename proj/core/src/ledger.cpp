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

#include "consentchain/ledger.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "consentchain/canonical.hpp"

namespace consentchain::ledger {

using nlohmann::json;

std::string_view validation_code_name(ValidationCode code) {
    switch (code) {
        case ValidationCode::Valid: return "Valid";
        case ValidationCode::MVCCConflict: return "MVCCConflict";
        case ValidationCode::PolicyFailure: return "PolicyFailure";
    }
    return "?";
}

std::optional<ValidationCode> validation_code_from_name(std::string_view name) {
    if (name == "Valid") return ValidationCode::Valid;
    if (name == "MVCCConflict") return ValidationCode::MVCCConflict;
    if (name == "PolicyFailure") return ValidationCode::PolicyFailure;
    return std::nullopt;
}

Transaction make_transaction(contracts::TxProposal proposal, const Hash256& creator_signature,
                             contracts::ReadWriteSet rwset,
                             std::vector<contracts::Endorsement> endorsements) {
    Transaction tx;
    tx.tx_id = contracts::proposal_digest(proposal).hex();
    tx.proposal = std::move(proposal);
    tx.creator_signature = creator_signature;
    tx.rwset = std::move(rwset);
    tx.endorsements = std::move(endorsements);
    return tx;
}

std::string canonical_tx_bytes(const Transaction& tx) {
    std::string out = "tx:" + tx.tx_id + "\n";
    out += contracts::canonical_proposal_bytes(tx.proposal);
    out += "creator_sig:" + tx.creator_signature.hex() + "\n";
    out += contracts::canonical_rwset_bytes(tx.rwset);
    for (const auto& endorsement : tx.endorsements) {
        out += "endorsement:" + endorsement.endorser + "@" + endorsement.rwset_digest.hex() +
               "@" + endorsement.signature.hex() + "\n";
    }
    out += "code:" +
           std::string(tx.validation_code ? validation_code_name(*tx.validation_code) : "-") +
           "\n";
    return out;
}

Hash256 merkle_root(std::vector<Hash256> leaves) {
    if (leaves.empty()) return sha256(std::string_view{});
    while (leaves.size() > 1) {
        if (leaves.size() % 2 != 0) leaves.push_back(leaves.back());
        for (std::size_t i = 0; i < leaves.size() / 2; ++i) {
            Sha256 hasher;
            hasher.update(leaves[2 * i].bytes.data(), 32);
            hasher.update(leaves[2 * i + 1].bytes.data(), 32);
            leaves[i] = hasher.finish();
        }
        leaves.resize(leaves.size() / 2);
    }
    return leaves[0];
}

Hash256 compute_data_hash(const std::vector<Transaction>& txs) {
    std::vector<Hash256> leaves;
    leaves.reserve(txs.size());
    for (const Transaction& tx : txs) {
        auto leaf = Hash256::from_hex(tx.tx_id);
        // Malformed ids cannot appear through make_transaction; map them
        // to the zero leaf so verification still flags the block.
        leaves.push_back(leaf ? *leaf : Hash256::zero());
    }
    return merkle_root(std::move(leaves));
}

std::string canonical_header_bytes(const Block& block) {
    std::string out;
    out += "height:" + std::to_string(block.height) + "\n";
    out += "prev:" + block.prev_hash.hex() + "\n";
    out += "data:" + block.data_hash.hex() + "\n";
    out += "time:" + std::to_string(block.timestamp) + "\n";
    return out;
}

Hash256 hash_block(const Block& block) { return sha256(canonical_header_bytes(block)); }

Hash256 block_content_hash(const Block& block) {
    Sha256 hasher;
    hasher.update(canonical_header_bytes(block));
    for (const Transaction& tx : block.txs) hasher.update(canonical_tx_bytes(tx));
    return hasher.finish();
}

Block genesis_block() {
    Block block;
    block.height = 0;
    block.prev_hash = Hash256::zero();
    block.data_hash = compute_data_hash({});
    block.timestamp = 0;
    return block;
}

namespace {

json tx_to_json_value(const Transaction& tx) {
    json reads = json::array();
    for (const auto& read : tx.rwset.reads) {
        reads.push_back({{"key", read.key},
                         {"version", read.version ? json(read.version->str()) : json(nullptr)}});
    }
    json writes = json::array();
    for (const auto& write : tx.rwset.writes) {
        writes.push_back({{"key", write.key}, {"value", to_hex(write.value)}});
    }
    json endorsements = json::array();
    for (const auto& endorsement : tx.endorsements) {
        endorsements.push_back({{"endorser", endorsement.endorser},
                                {"digest", endorsement.rwset_digest.hex()},
                                {"sig", endorsement.signature.hex()}});
    }
    return {{"tx_id", tx.tx_id},
            {"proposal_id", tx.proposal.proposal_id},
            {"creator", tx.proposal.creator},
            {"contract", std::string(contract_name(tx.proposal.contract))},
            {"action", tx.proposal.action},
            {"args", tx.proposal.args},
            {"client_timestamp", tx.proposal.client_timestamp},
            {"creator_sig", tx.creator_signature.hex()},
            {"reads", reads},
            {"writes", writes},
            {"endorsements", endorsements},
            {"code", tx.validation_code
                         ? json(std::string(validation_code_name(*tx.validation_code)))
                         : json(nullptr)}};
}

}  // namespace

std::string tx_to_json(const Transaction& tx) { return tx_to_json_value(tx).dump(); }

std::string block_to_json(const Block& block) {
    json txs = json::array();
    for (const Transaction& tx : block.txs) txs.push_back(tx_to_json_value(tx));
    json record = {{"height", block.height},
                   {"prev", block.prev_hash.hex()},
                   {"data", block.data_hash.hex()},
                   {"time", block.timestamp},
                   {"block_hash", hash_block(block).hex()},
                   {"content_hash", block_content_hash(block).hex()},
                   {"txs", txs}};
    return record.dump();
}

namespace {

Result<Hash256> hash_field(const json& value, const char* what) {
    if (!value.is_string()) return make_error(ErrorCode::BadParams, what);
    auto hash = Hash256::from_hex(value.get<std::string>());
    if (!hash) return make_error(ErrorCode::BadParams, std::string(what) + ": bad hex");
    return *hash;
}

Result<Transaction> tx_from_json(const json& item) {
    if (!item.is_object()) return make_error(ErrorCode::BadParams, "tx record");
    Transaction tx;
    try {
        tx.tx_id = item.at("tx_id").get<std::string>();
        tx.proposal.proposal_id = item.at("proposal_id").get<std::string>();
        tx.proposal.creator = item.at("creator").get<std::string>();
        auto contract = contracts::contract_from_name(item.at("contract").get<std::string>());
        if (!contract) return make_error(ErrorCode::UnknownContract, "tx record");
        tx.proposal.contract = *contract;
        tx.proposal.action = item.at("action").get<std::string>();
        tx.proposal.args = item.at("args").get<std::vector<std::string>>();
        tx.proposal.client_timestamp = item.at("client_timestamp").get<std::int64_t>();

        auto sig = hash_field(item.at("creator_sig"), "creator_sig");
        if (!sig) return sig.error();
        tx.creator_signature = sig.value();

        for (const auto& read : item.at("reads")) {
            contracts::ReadEntry entry;
            entry.key = read.at("key").get<std::string>();
            const json& version = read.at("version");
            if (!version.is_null()) {
                std::string text = version.get<std::string>();
                std::size_t dot = text.find('.');
                if (dot == std::string::npos)
                    return make_error(ErrorCode::BadParams, "read version");
                auto height = parse_int64(text.substr(0, dot));
                auto index = parse_int64(text.substr(dot + 1));
                if (!height || !index) return make_error(ErrorCode::BadParams, "read version");
                entry.version =
                    contracts::Version{*height, static_cast<std::int32_t>(*index)};
            }
            tx.rwset.reads.push_back(std::move(entry));
        }
        for (const auto& write : item.at("writes")) {
            auto bytes = from_hex(write.at("value").get<std::string>());
            if (!bytes) return make_error(ErrorCode::BadParams, "write value hex");
            tx.rwset.writes.push_back(contracts::WriteEntry{
                write.at("key").get<std::string>(), std::string(bytes->begin(), bytes->end())});
        }
        for (const auto& endorsement : item.at("endorsements")) {
            contracts::Endorsement entry;
            entry.endorser = endorsement.at("endorser").get<std::string>();
            auto digest = hash_field(endorsement.at("digest"), "endorsement digest");
            if (!digest) return digest.error();
            entry.rwset_digest = digest.value();
            auto endorsement_sig = hash_field(endorsement.at("sig"), "endorsement sig");
            if (!endorsement_sig) return endorsement_sig.error();
            entry.signature = endorsement_sig.value();
            tx.endorsements.push_back(std::move(entry));
        }
        const json& code = item.at("code");
        if (!code.is_null()) {
            auto parsed = validation_code_from_name(code.get<std::string>());
            if (!parsed) return make_error(ErrorCode::BadParams, "validation code");
            tx.validation_code = *parsed;
        }
    } catch (const json::exception& e) {
        return make_error(ErrorCode::BadParams, std::string("tx record: ") + e.what());
    }
    return tx;
}

}  // namespace

Result<Transaction> tx_from_json(std::string_view text) {
    json record = json::parse(text, nullptr, false);
    if (record.is_discarded())
        return make_error(ErrorCode::BadParams, "tx record: not valid JSON");
    return tx_from_json(record);
}

Result<Block> block_from_json(std::string_view text) {
    json record = json::parse(text, nullptr, false);
    if (record.is_discarded() || !record.is_object())
        return make_error(ErrorCode::BadParams, "block record: not a JSON object");
    Block block;
    try {
        block.height = record.at("height").get<std::int64_t>();
        block.timestamp = record.at("time").get<std::int64_t>();
        auto prev = hash_field(record.at("prev"), "prev");
        if (!prev) return prev.error();
        block.prev_hash = prev.value();
        auto data = hash_field(record.at("data"), "data");
        if (!data) return data.error();
        block.data_hash = data.value();
        for (const auto& item : record.at("txs")) {
            auto tx = tx_from_json(item);
            if (!tx) return tx.error();
            block.txs.push_back(std::move(tx).take());
        }
        // Stored self-hashes must match the decoded content.
        auto stored_hash = hash_field(record.at("block_hash"), "block_hash");
        if (!stored_hash) return stored_hash.error();
        if (stored_hash.value() != hash_block(block))
            return make_error(ErrorCode::BadParams, "block_hash mismatch");
        auto stored_content = hash_field(record.at("content_hash"), "content_hash");
        if (!stored_content) return stored_content.error();
        if (stored_content.value() != block_content_hash(block))
            return make_error(ErrorCode::BadParams, "content_hash mismatch");
    } catch (const json::exception& e) {
        return make_error(ErrorCode::BadParams, std::string("block record: ") + e.what());
    }
    return block;
}

std::optional<std::pair<std::string, contracts::Version>> WorldState::get(
    std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::make_pair(it->second.value, it->second.version);
}

const VersionedValue* WorldState::find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void WorldState::apply(const std::string& key, std::string value, contracts::Version version) {
    entries_[key] = VersionedValue{std::move(value), version};
}

std::vector<std::pair<std::string, VersionedValue>> WorldState::scan_prefix(
    std::string_view prefix) const {
    std::vector<std::pair<std::string, VersionedValue>> out;
    for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out.emplace_back(it->first, it->second);
    }
    return out;
}

std::string WorldState::digest_lines() const {
    std::string out;
    for (const auto& [key, entry] : entries_) {
        out += key + "=" + to_hex(entry.value) + "@" + entry.version.str() + "\n";
    }
    return out;
}

Hash256 WorldState::digest() const { return sha256(digest_lines()); }

namespace {

bool rwset_well_formed(const contracts::ReadWriteSet& rwset) {
    auto sorted_unique = [](const auto& entries) {
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (!(entries[i - 1].key < entries[i].key)) return false;
        }
        return true;
    };
    return sorted_unique(rwset.reads) && sorted_unique(rwset.writes);
}

/// Commit-time verdict for one transaction against the running state.
/// Policy problems (bad tx id, bad creator signature, unmet endorsement
/// policy, malformed rwset) take precedence over MVCC staleness.
ValidationCode judge_tx(const Transaction& tx, const WorldState& state,
                        const CommitContext& context) {
    if (tx.tx_id != contracts::proposal_digest(tx.proposal).hex())
        return ValidationCode::PolicyFailure;
    if (!rwset_well_formed(tx.rwset)) return ValidationCode::PolicyFailure;

    auto creator_id = context.pseudonyms.resolve(tx.proposal.creator);
    if (!creator_id) return ValidationCode::PolicyFailure;
    auto verified = context.registry.verify(
        *creator_id, contracts::canonical_proposal_bytes(tx.proposal), tx.creator_signature);
    if (!verified || !verified.value()) return ValidationCode::PolicyFailure;

    if (!contracts::check_endorsement_policy(context.policy, tx.endorsements,
                                             tx.proposal.proposal_id, tx.rwset,
                                             context.registry))
        return ValidationCode::PolicyFailure;

    for (const auto& read : tx.rwset.reads) {
        auto current = state.get(read.key);
        std::optional<contracts::Version> version;
        if (current) version = current->second;
        if (version != read.version) return ValidationCode::MVCCConflict;
    }
    return ValidationCode::Valid;
}

/// Assigns codes and applies valid writes; shared by commit and the
/// verification replay.
std::vector<ValidationCode> validate_block_txs(Block& block, const CommitContext& context,
                                               WorldState& state) {
    std::vector<ValidationCode> codes;
    codes.reserve(block.txs.size());
    for (std::size_t i = 0; i < block.txs.size(); ++i) {
        Transaction& tx = block.txs[i];
        ValidationCode code = judge_tx(tx, state, context);
        tx.validation_code = code;
        if (code == ValidationCode::Valid) {
            for (const auto& write : tx.rwset.writes) {
                state.apply(write.key, write.value,
                            contracts::Version{block.height, static_cast<std::int32_t>(i)});
            }
        }
        codes.push_back(code);
    }
    return codes;
}

Status append_record(const std::string& path, const std::string& record) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) return make_error(ErrorCode::IoError, "cannot append to " + path);
    out << record.size() << "\n" << record << "\n";
    if (!out) return make_error(ErrorCode::IoError, "short write to " + path);
    return ok_status();
}

}  // namespace

Ledger::Ledger() {
    Block genesis = genesis_block();
    tx_ids_.clear();
    blocks_.push_back(std::move(genesis));
}

Result<Ledger> Ledger::open(const std::string& path) {
    Ledger ledger;
    ledger.path_ = path;

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        // Fresh chain: persist genesis.
        auto appended = append_record(path, block_to_json(ledger.blocks_.front()));
        if (!appended) return appended.error();
        return ledger;
    }

    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    std::vector<Block> blocks;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos)
            return make_error(ErrorCode::IoError, "truncated length prefix in " + path);
        auto length = parse_int64(text.substr(pos, eol - pos));
        if (!length || *length < 0)
            return make_error(ErrorCode::IoError, "bad length prefix in " + path);
        std::size_t start = eol + 1;
        if (start + static_cast<std::size_t>(*length) > text.size())
            return make_error(ErrorCode::IoError, "truncated record in " + path);
        auto block = block_from_json(text.substr(start, *length));
        if (!block) return block.error();
        blocks.push_back(std::move(block).take());
        pos = start + *length;
        if (pos < text.size() && text[pos] == '\n') ++pos;
    }
    if (blocks.empty() || !(blocks.front() == genesis_block()))
        return make_error(ErrorCode::IoError, "chain log does not start at genesis");

    ledger.blocks_.clear();
    for (Block& block : blocks) {
        if (!ledger.blocks_.empty()) {
            const Block& tip = ledger.blocks_.back();
            if (block.height != tip.height + 1 || block.prev_hash != hash_block(tip))
                return make_error(ErrorCode::BrokenLink,
                                  "height " + std::to_string(block.height));
            // Rebuild state from the stored codes; full re-validation is
            // verify()'s job.
            for (std::size_t i = 0; i < block.txs.size(); ++i) {
                const Transaction& tx = block.txs[i];
                if (tx.validation_code == ValidationCode::Valid) {
                    for (const auto& write : tx.rwset.writes) {
                        ledger.state_.apply(
                            write.key, write.value,
                            contracts::Version{block.height, static_cast<std::int32_t>(i)});
                    }
                }
            }
        }
        for (const Transaction& tx : block.txs) ledger.tx_ids_.insert(tx.tx_id);
        ledger.blocks_.push_back(std::move(block));
    }
    return ledger;
}

Result<std::vector<ValidationCode>> Ledger::commit_block(Block block,
                                                         const CommitContext& context) {
    const Block& tip = blocks_.back();
    if (block.height != tip.height + 1)
        return make_error(ErrorCode::BrokenLink,
                          "height " + std::to_string(block.height) + " after " +
                              std::to_string(tip.height));
    if (block.prev_hash != hash_block(tip))
        return make_error(ErrorCode::BrokenLink, "prev hash mismatch");
    if (block.timestamp < tip.timestamp)
        return make_error(ErrorCode::BrokenLink, "timestamp regressed");
    if (block.data_hash != compute_data_hash(block.txs))
        return make_error(ErrorCode::BrokenLink, "data hash mismatch");

    // Validate against a staged copy so a failed log append leaves the
    // committed view untouched.
    WorldState staged = state_;
    std::vector<ValidationCode> codes = validate_block_txs(block, context, staged);

    if (path_) {
        auto appended = append_record(*path_, block_to_json(block));
        if (!appended) return appended.error();
    }
    for (const Transaction& tx : block.txs) tx_ids_.insert(tx.tx_id);
    state_ = std::move(staged);
    blocks_.push_back(std::move(block));
    return codes;
}

std::vector<HistoryEntry> Ledger::history(std::string_view key) const {
    std::vector<HistoryEntry> out;
    for (const Block& block : blocks_) {
        for (const Transaction& tx : block.txs) {
            if (tx.validation_code != ValidationCode::Valid) continue;
            for (const auto& write : tx.rwset.writes) {
                if (write.key == key) {
                    out.push_back(HistoryEntry{tx.tx_id, tx.proposal.creator, block.timestamp,
                                               write.value});
                }
            }
        }
    }
    return out;
}

VerifyReport Ledger::verify(const CommitContext& context) const {
    return verify_blocks(blocks_, context);
}

VerifyReport Ledger::verify_blocks(const std::vector<Block>& blocks,
                                   const CommitContext& context) {
    auto bad = [](std::int64_t height, std::string reason) {
        return VerifyReport{false, height, std::move(reason)};
    };
    if (blocks.empty()) return bad(0, "empty chain");
    if (!(blocks.front() == genesis_block())) return bad(0, "genesis mismatch");

    WorldState replay;
    for (std::size_t h = 1; h < blocks.size(); ++h) {
        const Block& block = blocks[h];
        const Block& prev = blocks[h - 1];
        std::int64_t expected_height = static_cast<std::int64_t>(h);
        if (block.height != expected_height) return bad(expected_height, "height out of sequence");
        if (block.prev_hash != hash_block(prev)) return bad(expected_height, "broken prev link");
        if (block.timestamp < prev.timestamp) return bad(expected_height, "timestamp regressed");

        for (const Transaction& tx : block.txs) {
            if (tx.tx_id != contracts::proposal_digest(tx.proposal).hex())
                return bad(expected_height, "tx id mismatch");
            if (!tx.validation_code) return bad(expected_height, "missing validation code");
            // Admission drops anything unverifiable, so every stored
            // signature must check out; a mismatch here is tampering.
            auto creator_id = context.pseudonyms.resolve(tx.proposal.creator);
            if (!creator_id) return bad(expected_height, "creator unresolvable");
            auto creator_ok = context.registry.verify(
                *creator_id, contracts::canonical_proposal_bytes(tx.proposal),
                tx.creator_signature);
            if (!creator_ok || !creator_ok.value())
                return bad(expected_height, "creator signature invalid");
            Hash256 digest = contracts::rwset_digest(tx.rwset);
            for (const auto& endorsement : tx.endorsements) {
                if (endorsement.rwset_digest != digest)
                    return bad(expected_height, "endorsement digest mismatch");
                auto endorsement_ok = context.registry.verify(
                    endorsement.endorser,
                    contracts::endorsement_message(tx.proposal.proposal_id,
                                                   endorsement.rwset_digest),
                    endorsement.signature);
                if (!endorsement_ok || !endorsement_ok.value())
                    return bad(expected_height, "endorsement signature invalid");
            }
        }
        if (block.data_hash != compute_data_hash(block.txs))
            return bad(expected_height, "data hash mismatch");

        Block copy = block;
        std::vector<ValidationCode> expected = validate_block_txs(copy, context, replay);
        for (std::size_t i = 0; i < block.txs.size(); ++i) {
            if (block.txs[i].validation_code != expected[i])
                return bad(expected_height, "validation code mismatch");
        }
    }
    return VerifyReport{};
}

}  // namespace consentchain::ledger
