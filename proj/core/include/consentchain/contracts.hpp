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

#ifndef CONSENTCHAIN_CONTRACTS_HPP
#define CONSENTCHAIN_CONTRACTS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"
#include "consentchain/identity.hpp"

namespace consentchain::contracts {

/// The built-in governance contracts. Fixed set by design: the norms
/// are the platform, not user-deployable code.
enum class ContractName { Consent, Data, Audit };

std::string_view contract_name(ContractName contract);
std::optional<ContractName> contract_from_name(std::string_view name);

/// Splits a dotted action like "consent.respond" into contract + action.
Result<std::pair<ContractName, std::string>> parse_action(std::string_view dotted);

struct TxProposal {
    std::string proposal_id;
    std::string creator;  // on-chain ref: raw id or ~pseudonym
    ContractName contract = ContractName::Consent;
    std::string action;
    std::vector<std::string> args;
    std::int64_t client_timestamp = 0;

    bool operator==(const TxProposal&) const = default;
};

/// Canonical proposal bytes; tx_id = hex(SHA-256(these)). Args are
/// backslash-escaped before comma-joining so the encoding is injective
/// for arbitrary strings.
std::string canonical_proposal_bytes(const TxProposal& proposal);
Hash256 proposal_digest(const TxProposal& proposal);

/// State version: which block/tx wrote the value. tx_index counts all
/// transactions in the block, valid or not.
struct Version {
    std::int64_t height = 0;
    std::int32_t tx_index = 0;

    auto operator<=>(const Version&) const = default;
    std::string str() const;  // "<height>.<tx_index>"
};

struct ReadEntry {
    std::string key;
    std::optional<Version> version;  // nullopt: key absent at snapshot

    bool operator==(const ReadEntry&) const = default;
};

struct WriteEntry {
    std::string key;
    std::string value;  // raw bytes

    bool operator==(const WriteEntry&) const = default;
};

/// Deterministic simulation output: reads with observed versions,
/// writes with values, both unique and sorted by key.
struct ReadWriteSet {
    std::vector<ReadEntry> reads;
    std::vector<WriteEntry> writes;

    bool operator==(const ReadWriteSet&) const = default;
};

std::string canonical_rwset_bytes(const ReadWriteSet& rwset);
Hash256 rwset_digest(const ReadWriteSet& rwset);

/// Peer signature over (proposal_id ‖ rwset digest).
struct Endorsement {
    std::string endorser;
    Hash256 rwset_digest;
    Hash256 signature;

    bool operator==(const Endorsement&) const = default;
};

std::string endorsement_message(const std::string& proposal_id, const Hash256& digest);
Endorsement endorse(const identity::Credential& endorser, const std::string& proposal_id,
                    const ReadWriteSet& rwset);

/// k-of-n over a fixed endorser set.
struct EndorsementPolicy {
    int k = 1;
    std::set<std::string> endorser_set;
};

/// Immutable committed-state view a simulation runs against.
class StateView {
public:
    virtual ~StateView() = default;
    virtual std::optional<std::pair<std::string, Version>> get(std::string_view key) const = 0;
};

/// Lets endorsing peers cross-check a Data.submit against the actual
/// off-chain payload (existence + field names) before signing.
class PayloadDirectory {
public:
    virtual ~PayloadDirectory() = default;
    virtual std::optional<std::vector<std::string>> fields_of(
        const Hash256& payload_hash) const = 0;
};

struct ContractContext {
    const identity::Registry& registry;
    const identity::PseudonymTable& pseudonyms;
    Hash256 network_salt;
    const PayloadDirectory* payloads = nullptr;
};

/// Runs the named contract action against the snapshot without mutating
/// it. Governance violations reject here, at simulation time; only
/// concurrency conflicts are left for commit-time validation.
///
/// State keys touched:
///   declaration/<decl_hash_hex>
///   consent/<subject_pseudonym_hex>/<decl_hash_hex>
///   record/<subject_pseudonym_hex>/<payload_hash_hex>
///   identity/<actor_ref>
Result<ReadWriteSet> simulate_proposal(const TxProposal& proposal, const StateView& snapshot,
                                       const ContractContext& context);

/// True iff at least k valid endorsements from distinct policy members
/// cover this exact rwset. Invalid endorsements are ignored, not fatal.
bool check_endorsement_policy(const EndorsementPolicy& policy,
                              const std::vector<Endorsement>& endorsements,
                              const std::string& proposal_id, const ReadWriteSet& rwset,
                              const identity::Registry& registry);

// Key builders shared with the pipeline and queries.
std::string declaration_key(const Hash256& declaration_hash);
std::string consent_key(const Hash256& subject_pseudonym, const Hash256& declaration_hash);
std::string record_key(const Hash256& subject_pseudonym, const Hash256& payload_hash);
std::string identity_key(std::string_view actor_ref);

/// On-chain reference to an off-chain payload: hashes and refs only,
/// never a raw subject id or a payload value. Written by Data.submit
/// under record/<subject_pseudonym_hex>/<payload_hash_hex>; the block
/// locator is the state version the write got at commit.
struct HealthRecordRef {
    Hash256 payload_hash;
    Hash256 subject_pseudonym;
    Hash256 declaration_hash;
    std::string submitted_by;  // on-chain ref
    std::optional<Hash256> supersedes;

    bool operator==(const HealthRecordRef&) const = default;
};

std::string render_record_ref(const HealthRecordRef& ref);
Result<HealthRecordRef> parse_record_ref(std::string_view bytes);

}  // namespace consentchain::contracts

#endif
