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

#include "consentchain/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "consentchain/canonical.hpp"
#include "consentchain/consent.hpp"

namespace consentchain::pipeline {

namespace fs = std::filesystem;

Result<std::string> canonical_payload_bytes(const Payload& payload) {
    std::string out;
    for (const auto& [field, value] : payload) {
        if (!is_valid_field_name(field)) return make_error(ErrorCode::BadFieldName, field);
        out += field + "=" + escape_value(value) + "\n";
    }
    return out;
}

Result<Payload> parse_payload(std::string_view bytes) {
    Payload out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string_view::npos)
            return make_error(ErrorCode::BadParams, "payload: missing newline");
        std::string_view line = bytes.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            return make_error(ErrorCode::BadParams, "payload: missing separator");
        std::string field(line.substr(0, eq));
        if (!is_valid_field_name(field)) return make_error(ErrorCode::BadFieldName, field);
        auto value = unescape_value(line.substr(eq + 1));
        if (!value) return make_error(ErrorCode::BadParams, "payload: bad escape");
        if (out.count(field) != 0) return make_error(ErrorCode::DuplicateKey, field);
        out.emplace(std::move(field), std::move(*value));
    }
    return out;
}

Hash256 payload_hash(std::string_view canonical_bytes) { return sha256(canonical_bytes); }

Result<OffchainStore> OffchainStore::open(const std::string& directory) {
    OffchainStore store;
    store.directory_ = directory;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) return make_error(ErrorCode::IoError, "cannot create " + directory);
    for (const auto& entry : fs::directory_iterator(directory, ec)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (!Hash256::from_hex(name)) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        store.blobs_[name] = buffer.str();
    }
    if (ec) return make_error(ErrorCode::IoError, "cannot scan " + directory);
    return store;
}

Result<Hash256> OffchainStore::put(const Payload& payload) {
    auto bytes = canonical_payload_bytes(payload);
    if (!bytes) return bytes.error();
    Hash256 hash = payload_hash(bytes.value());
    std::string hex = hash.hex();
    if (blobs_.count(hex) == 0) {
        if (directory_) {
            std::ofstream out(fs::path(*directory_) / hex, std::ios::binary | std::ios::trunc);
            if (!out) return make_error(ErrorCode::IoError, "cannot write payload " + hex);
            out << bytes.value();
        }
        blobs_.emplace(hex, std::move(bytes).take());
    }
    return hash;
}

std::optional<Payload> OffchainStore::get(const Hash256& hash) const {
    auto it = blobs_.find(hash.hex());
    if (it == blobs_.end()) return std::nullopt;
    auto parsed = parse_payload(it->second);
    if (!parsed) return std::nullopt;
    return parsed.value();
}

bool OffchainStore::contains(const Hash256& hash) const {
    return blobs_.count(hash.hex()) != 0;
}

bool OffchainStore::erase(const Hash256& hash) {
    std::string hex = hash.hex();
    auto it = blobs_.find(hex);
    if (it == blobs_.end()) return false;
    blobs_.erase(it);
    if (directory_) {
        std::error_code ec;
        fs::remove(fs::path(*directory_) / hex, ec);
    }
    return true;
}

std::optional<std::vector<std::string>> OffchainStore::fields_of(const Hash256& hash) const {
    auto payload = get(hash);
    if (!payload) return std::nullopt;
    std::vector<std::string> fields;
    fields.reserve(payload->size());
    for (const auto& [field, value] : *payload) fields.push_back(field);
    return fields;
}

namespace {

Result<consent::ConsentRecord> consent_record_from_state(const PipelineContext& context,
                                                         const Hash256& subject_pseudonym,
                                                         const Hash256& declaration_hash) {
    const auto* entry = context.ledger.state().find(
        contracts::consent_key(subject_pseudonym, declaration_hash));
    if (entry == nullptr)
        return make_error(ErrorCode::ConsentRequired, "no consent record for declaration");
    return consent::parse_record(entry->value);
}

}  // namespace

Result<contracts::TxProposal> submit_health_record(
    const PipelineContext& context, const std::string& submitter_id,
    const std::string& subject_id, const prose::PurposeDeclaration& declaration,
    const Payload& payload, std::int64_t now, std::string proposal_id,
    const std::optional<Hash256>& supersedes) {
    // (1) role
    const identity::Actor* submitter = context.registry.find(submitter_id);
    if (submitter == nullptr) return make_error(ErrorCode::UnknownActor, submitter_id);
    if (!submitter->has_role(identity::Role::DataController) &&
        !submitter->has_role(identity::Role::DataProcessor))
        return make_error(ErrorCode::RoleDenied, submitter_id);

    const identity::Actor* subject = context.registry.find(subject_id);
    if (subject == nullptr) return make_error(ErrorCode::UnknownActor, subject_id);
    if (!subject->has_role(identity::Role::DataSubject))
        return make_error(ErrorCode::RoleDenied, "subject must hold DataSubject: " + subject_id);

    // (2) consent under exactly this declaration
    Hash256 declaration_hash = prose::hash_declaration(declaration);
    Hash256 subject_pseudonym =
        identity::pseudonym(context.config.network_salt, subject_id);
    auto record = consent_record_from_state(context, subject_pseudonym, declaration_hash);
    if (!record) return record.error();
    if (!consent::is_access_permitted(record.value(), declaration_hash, now))
        return make_error(ErrorCode::ConsentRequired,
                          std::string(consent::state_name(
                              consent::consent_status_at(record.value(), now))));

    // (3) minimization
    std::vector<std::string> fields;
    fields.reserve(payload.size());
    for (const auto& [field, value] : payload) {
        if (!is_valid_field_name(field)) return make_error(ErrorCode::BadFieldName, field);
        fields.push_back(field);
    }
    auto violations = prose::check_field_subset(declaration, fields);
    if (!violations.empty())
        return make_error(ErrorCode::MinimizationViolation, join_csv(violations));

    auto stored = context.store.put(payload);
    if (!stored) return stored.error();

    contracts::TxProposal proposal;
    proposal.proposal_id = std::move(proposal_id);
    proposal.creator = identity::onchain_ref(*submitter, context.config.network_salt);
    proposal.contract = contracts::ContractName::Data;
    proposal.action = "submit";
    proposal.args = {identity::onchain_ref(*subject, context.config.network_salt),
                     declaration_hash.hex(), stored.value().hex(), join_csv(fields),
                     supersedes ? supersedes->hex() : std::string("-")};
    proposal.client_timestamp = now;
    return proposal;
}

Result<std::vector<OwnRecord>> read_own_records(const PipelineContext& context,
                                                const std::string& subject_id,
                                                std::int64_t /*now*/) {
    const identity::Actor* subject = context.registry.find(subject_id);
    if (subject == nullptr) return make_error(ErrorCode::UnknownActor, subject_id);
    if (!subject->has_role(identity::Role::DataSubject))
        return make_error(ErrorCode::RoleDenied, subject_id);

    Hash256 subject_pseudonym =
        identity::pseudonym(context.config.network_salt, subject_id);
    std::vector<OwnRecord> out;
    for (const auto& [key, entry] :
         context.ledger.state().scan_prefix("record/" + subject_pseudonym.hex() + "/")) {
        auto ref = contracts::parse_record_ref(entry.value);
        if (!ref) continue;
        OwnRecord record;
        record.ref = ref.value();
        record.version = entry.version;
        record.payload = context.store.get(record.ref.payload_hash);
        record.erased = !record.payload.has_value();
        out.push_back(std::move(record));
    }
    return out;
}

Result<std::map<std::string, std::int64_t>> query_aggregate(const PipelineContext& context,
                                                            const std::string& requester_id,
                                                            const std::string& group_by_field,
                                                            const Hash256& declaration_hash,
                                                            std::int64_t now) {
    if (context.registry.find(requester_id) == nullptr)
        return make_error(ErrorCode::UnknownActor, requester_id);

    const auto* declaration_entry =
        context.ledger.state().find(contracts::declaration_key(declaration_hash));
    if (declaration_entry == nullptr)
        return make_error(ErrorCode::UnknownKey, "declaration not published");
    auto declaration = prose::parse_declaration(declaration_entry->value);
    if (!declaration) return declaration.error();
    if (!declaration.value().allows_field(group_by_field))
        return make_error(ErrorCode::UnknownField, group_by_field);

    std::map<std::string, std::int64_t> counts;
    for (const auto& [key, entry] : context.ledger.state().scan_prefix("record/")) {
        auto ref = contracts::parse_record_ref(entry.value);
        if (!ref) continue;
        if (ref.value().declaration_hash != declaration_hash) continue;

        // Consent must stand granted at the query time.
        auto record =
            consent_record_from_state(context, ref.value().subject_pseudonym, declaration_hash);
        if (!record) continue;
        if (!consent::is_access_permitted(record.value(), declaration_hash, now)) continue;

        // Retention: the record exists at `now` and is not older than the
        // declared window (timestamps count days).
        std::int64_t committed_at =
            context.ledger.blocks()[static_cast<std::size_t>(entry.version.height)].timestamp;
        std::int64_t age = now - committed_at;
        if (age < 0 || age > declaration.value().retention_days) continue;

        auto payload = context.store.get(ref.value().payload_hash);
        if (!payload) continue;  // erased
        auto value = payload->find(group_by_field);
        if (value == payload->end()) continue;
        ++counts[value->second];
    }

    for (auto it = counts.begin(); it != counts.end();) {
        if (it->second < context.config.k_anonymity_threshold) {
            it = counts.erase(it);
        } else {
            ++it;
        }
    }
    return counts;
}

Result<std::vector<ProvenanceEntry>> provenance_of(const PipelineContext& context,
                                                   const std::string& requester_id,
                                                   const std::string& key) {
    (void)requester_id;  // provenance is transparent by design
    std::vector<ProvenanceEntry> out;
    for (const auto& block : context.ledger.blocks()) {
        for (const auto& tx : block.txs) {
            bool touches = std::any_of(tx.rwset.writes.begin(), tx.rwset.writes.end(),
                                       [&](const auto& write) { return write.key == key; });
            if (!touches) continue;
            ProvenanceEntry entry;
            entry.actor = tx.proposal.creator;
            entry.action = std::string(contracts::contract_name(tx.proposal.contract)) + "." +
                           tx.proposal.action;
            entry.block_timestamp = block.timestamp;
            entry.validation_code =
                tx.validation_code.value_or(ledger::ValidationCode::PolicyFailure);
            entry.tx_id = tx.tx_id;
            out.push_back(std::move(entry));
        }
    }
    if (out.empty()) return make_error(ErrorCode::UnknownKey, key);
    return out;
}

void reconcile_erasures(const std::vector<ledger::Block>& blocks, OffchainStore& store) {
    struct Committed {
        contracts::HealthRecordRef ref;
        contracts::Version version;
    };
    std::vector<Committed> records;
    // (subject_pseudonym_hex, declaration_hash_hex) -> revocation versions
    std::map<std::pair<std::string, std::string>, std::vector<contracts::Version>> revocations;

    for (const auto& block : blocks) {
        for (std::size_t i = 0; i < block.txs.size(); ++i) {
            const auto& tx = block.txs[i];
            if (tx.validation_code != ledger::ValidationCode::Valid) continue;
            contracts::Version version{block.height, static_cast<std::int32_t>(i)};
            for (const auto& write : tx.rwset.writes) {
                if (write.key.rfind("record/", 0) == 0) {
                    auto ref = contracts::parse_record_ref(write.value);
                    if (ref) records.push_back(Committed{std::move(ref).take(), version});
                } else if (write.key.rfind("consent/", 0) == 0) {
                    auto record = consent::parse_record(write.value);
                    if (record && record.value().state == consent::ConsentState::Revoked) {
                        std::size_t slash = write.key.find('/', 8);
                        if (slash == std::string::npos) continue;
                        revocations[{write.key.substr(8, slash - 8),
                                     record.value().declaration_hash.hex()}]
                            .push_back(version);
                    }
                }
            }
        }
    }

    for (const auto& committed : records) {
        if (committed.ref.supersedes) store.erase(*committed.ref.supersedes);
        auto it = revocations.find({committed.ref.subject_pseudonym.hex(),
                                    committed.ref.declaration_hash.hex()});
        if (it == revocations.end()) continue;
        for (const auto& revoked_at : it->second) {
            if (committed.version < revoked_at) {
                store.erase(committed.ref.payload_hash);
                break;
            }
        }
    }
}

void apply_erasure_hooks(const ledger::Ledger& ledger, const ledger::Block& block,
                         OffchainStore& store) {
    for (const auto& tx : block.txs) {
        if (tx.validation_code != ledger::ValidationCode::Valid) continue;
        for (const auto& write : tx.rwset.writes) {
            if (write.key.rfind("record/", 0) == 0) {
                // Rectification: a superseding record erases the payload
                // it replaces.
                auto ref = contracts::parse_record_ref(write.value);
                if (ref && ref.value().supersedes) store.erase(*ref.value().supersedes);
            } else if (write.key.rfind("consent/", 0) == 0) {
                // Revocation: drop every stored payload shared under the
                // revoked (subject, declaration) pair.
                auto record = consent::parse_record(write.value);
                if (!record || record.value().state != consent::ConsentState::Revoked) continue;
                std::size_t slash = write.key.find('/', 8);
                if (slash == std::string::npos) continue;
                std::string subject_hex = write.key.substr(8, slash - 8);
                for (const auto& [key, entry] :
                     ledger.state().scan_prefix("record/" + subject_hex + "/")) {
                    auto ref = contracts::parse_record_ref(entry.value);
                    if (ref &&
                        ref.value().declaration_hash == record.value().declaration_hash)
                        store.erase(ref.value().payload_hash);
                }
            }
        }
    }
}

}  // namespace consentchain::pipeline
