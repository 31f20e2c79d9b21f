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

#ifndef CONSENTCHAIN_PIPELINE_HPP
#define CONSENTCHAIN_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consentchain/contracts.hpp"
#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"
#include "consentchain/identity.hpp"
#include "consentchain/ledger.hpp"
#include "consentchain/legalprose.hpp"
#include "consentchain/netconfig.hpp"

namespace consentchain::pipeline {

/// Payload values live off-chain only; the chain sees their hash. A
/// payload is a flat field -> value map with [a-z0-9_]+ field names.
using Payload = std::map<std::string, std::string>;

/// Canonical payload bytes: sorted `field=escaped_value\n` lines.
/// payload hash = SHA-256 over them.
Result<std::string> canonical_payload_bytes(const Payload& payload);
Result<Payload> parse_payload(std::string_view bytes);
Hash256 payload_hash(std::string_view canonical_bytes);

/// Content-addressed payload store: a directory of files named by
/// payload hash hex, or a plain in-memory map for simulation. Erasure
/// deletes the payload; on-chain refs stay.
class OffchainStore final : public contracts::PayloadDirectory {
public:
    OffchainStore() = default;  // in-memory
    static Result<OffchainStore> open(const std::string& directory);

    Result<Hash256> put(const Payload& payload);
    std::optional<Payload> get(const Hash256& hash) const;
    bool contains(const Hash256& hash) const;
    bool erase(const Hash256& hash);
    std::size_t size() const { return blobs_.size(); }

    std::optional<std::vector<std::string>> fields_of(const Hash256& hash) const override;

private:
    std::map<std::string, std::string> blobs_;  // hash hex -> canonical bytes
    std::optional<std::string> directory_;
};

/// Read-side wiring the pipeline operations run against.
struct PipelineContext {
    const identity::Registry& registry;
    const identity::PseudonymTable& pseudonyms;
    const NetworkConfig& config;
    const ledger::Ledger& ledger;
    OffchainStore& store;
};

/// Governed ingestion. Checks run in fixed order: (1) submitter role,
/// (2) consent permits access under exactly this declaration now,
/// (3) payload fields within the declared set. On success it stores the payload
/// off-chain and emits the Data.submit proposal.
Result<contracts::TxProposal> submit_health_record(
    const PipelineContext& context, const std::string& submitter_id,
    const std::string& subject_id, const prose::PurposeDeclaration& declaration,
    const Payload& payload, std::int64_t now, std::string proposal_id,
    const std::optional<Hash256>& supersedes = std::nullopt);

struct OwnRecord {
    contracts::HealthRecordRef ref;
    contracts::Version version;
    std::optional<Payload> payload;  // nullopt once erased
    bool erased = false;
};

/// Everything committed under the subject's pseudonym, with payloads
/// joined from the store; erased payloads come back as markers.
Result<std::vector<OwnRecord>> read_own_records(const PipelineContext& context,
                                                const std::string& subject_id, std::int64_t now);

/// Group counts over records whose consent is Granted at `now` and whose
/// age is within the declaration's retention window. Groups smaller than
/// the k-anonymity threshold are suppressed; no field value other than
/// the grouping value leaves this function.
Result<std::map<std::string, std::int64_t>> query_aggregate(const PipelineContext& context,
                                                            const std::string& requester_id,
                                                            const std::string& group_by_field,
                                                            const Hash256& declaration_hash,
                                                            std::int64_t now);

struct ProvenanceEntry {
    std::string actor;   // on-chain creator ref
    std::string action;  // dotted contract.action
    std::int64_t block_timestamp = 0;
    ledger::ValidationCode validation_code = ledger::ValidationCode::Valid;
    std::string tx_id;
};

/// Full write history of a key including invalid attempts, in chain
/// order. Transparent by design: any registered requester may ask.
Result<std::vector<ProvenanceEntry>> provenance_of(const PipelineContext& context,
                                                   const std::string& requester_id,
                                                   const std::string& key);

/// Post-commit hook: erases off-chain payloads for superseded records
/// and for records whose consent was just revoked. Call once per
/// committed block, after the state update.
void apply_erasure_hooks(const ledger::Ledger& ledger, const ledger::Block& block,
                         OffchainStore& store);

/// Idempotent whole-chain form of the same rule, for startup after a
/// crash between commit and hook: a payload is erased iff its record was
/// superseded, or a revocation of its (subject, declaration) committed
/// after the record did. Records shared under a later re-grant survive.
void reconcile_erasures(const std::vector<ledger::Block>& blocks, OffchainStore& store);

}  // namespace consentchain::pipeline

#endif
