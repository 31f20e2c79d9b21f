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

#ifndef CONSENTCHAIN_LEDGER_HPP
#define CONSENTCHAIN_LEDGER_HPP

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

namespace consentchain::ledger {

enum class ValidationCode { Valid, MVCCConflict, PolicyFailure };

std::string_view validation_code_name(ValidationCode code);
std::optional<ValidationCode> validation_code_from_name(std::string_view name);

/// An ordered transaction. tx_id = hex(SHA-256(canonical proposal
/// bytes)); the validation code is assigned exactly once, at commit.
/// Invalid transactions stay on the chain with their code: rejected
/// attempts are part of the audit trail.
struct Transaction {
    std::string tx_id;
    contracts::TxProposal proposal;
    Hash256 creator_signature;  // over canonical proposal bytes
    contracts::ReadWriteSet rwset;
    std::vector<contracts::Endorsement> endorsements;
    std::optional<ValidationCode> validation_code;

    bool operator==(const Transaction&) const = default;
};

Transaction make_transaction(contracts::TxProposal proposal, const Hash256& creator_signature,
                             contracts::ReadWriteSet rwset,
                             std::vector<contracts::Endorsement> endorsements);

/// Full canonical bytes of a committed transaction (proposal, creator
/// signature, rwset, endorsements, code). Covered by the block's
/// content hash so any stored byte is tamper-evident.
std::string canonical_tx_bytes(const Transaction& tx);

struct Block {
    std::int64_t height = 0;
    Hash256 prev_hash;  // 32 zero bytes for genesis
    Hash256 data_hash;  // Merkle root of tx ids
    std::int64_t timestamp = 0;
    std::vector<Transaction> txs;

    bool operator==(const Block&) const = default;
};

/// Merkle root: leaves are the 32-byte tx-id digests, interior nodes
/// SHA-256(left ‖ right), last node duplicated on odd levels, empty
/// list hashes to SHA-256 of the empty byte string.
Hash256 merkle_root(std::vector<Hash256> leaves);

Hash256 compute_data_hash(const std::vector<Transaction>& txs);

/// Canonical header bytes `height:<n>\nprev:<hex>\ndata:<hex>\ntime:<n>\n`.
std::string canonical_header_bytes(const Block& block);

/// Block hash = SHA-256 over the canonical header bytes.
Hash256 hash_block(const Block& block);

/// SHA-256 over header bytes plus every transaction's canonical bytes;
/// stored with each chain-file record as its integrity checksum.
Hash256 block_content_hash(const Block& block);

/// The shared genesis: height 0, zero prev hash, no transactions
/// (data hash = SHA-256("")), time 0.
Block genesis_block();

/// Canonical block record JSON (sorted keys, compact). This is the
/// byte-exact form stored in chain.log and served by the raw-chain
/// endpoint; it carries block_hash and content_hash alongside the
/// block fields.
std::string block_to_json(const Block& block);
Result<Block> block_from_json(std::string_view text);

std::string tx_to_json(const Transaction& tx);
Result<Transaction> tx_from_json(std::string_view text);

struct VersionedValue {
    std::string value;
    contracts::Version version;
};

/// Versioned key-value state; a pure function of the chain.
class WorldState final : public contracts::StateView {
public:
    std::optional<std::pair<std::string, contracts::Version>> get(
        std::string_view key) const override;
    const VersionedValue* find(std::string_view key) const;
    void apply(const std::string& key, std::string value, contracts::Version version);

    std::vector<std::pair<std::string, VersionedValue>> scan_prefix(
        std::string_view prefix) const;

    std::size_t size() const { return entries_.size(); }

    /// Sorted `key=value_hex@height.txidx` lines; digest() hashes them.
    std::string digest_lines() const;
    Hash256 digest() const;

private:
    std::map<std::string, VersionedValue, std::less<>> entries_;
};

/// Everything commit-time validation needs besides the block itself.
struct CommitContext {
    const identity::Registry& registry;
    const identity::PseudonymTable& pseudonyms;
    contracts::EndorsementPolicy policy;
};

struct VerifyReport {
    bool ok = true;
    std::int64_t first_bad_height = -1;
    std::string reason;
};

struct HistoryEntry {
    std::string tx_id;
    std::string creator;
    std::int64_t block_timestamp = 0;
    std::string value;
};

/// Hash-linked chain plus derived world state, optionally backed by an
/// append-only chain.log. Exactly one committer may call commit_block;
/// reads are safe between commits. Nothing here can remove or rewrite
/// a committed block.
class Ledger {
public:
    /// Fresh in-memory ledger holding only genesis.
    Ledger();

    /// File-backed ledger: replays an existing chain.log or creates one
    /// containing genesis. Replay rebuilds the world state from the
    /// stored validation codes (crash recovery = replay determinism).
    static Result<Ledger> open(const std::string& path);

    /// Validates and commits: checks the header link (BrokenLink rejects
    /// the whole block), assigns each transaction its validation code
    /// (policy first, then MVCC), applies the writes of valid ones, and
    /// appends the record to chain.log when file-backed.
    Result<std::vector<ValidationCode>> commit_block(Block block, const CommitContext& context);

    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& tip() const { return blocks_.back(); }
    std::int64_t height() const { return tip().height; }
    Hash256 tip_hash() const { return hash_block(tip()); }
    const WorldState& state() const { return state_; }

    /// Every valid write to `key`, in chain order.
    std::vector<HistoryEntry> history(std::string_view key) const;

    /// Recomputes everything from genesis: canonical genesis, height
    /// sequence, prev links, timestamp monotonicity, tx ids, Merkle
    /// data hashes, block and content hashes, creator and endorsement
    /// signatures, and the validation codes via deterministic replay.
    /// Reports the first inconsistent height.
    VerifyReport verify(const CommitContext& context) const;
    static VerifyReport verify_blocks(const std::vector<Block>& blocks,
                                      const CommitContext& context);

    bool has_tx(std::string_view tx_id) const { return tx_ids_.count(tx_id) != 0; }

private:
    std::vector<Block> blocks_;
    WorldState state_;
    std::set<std::string, std::less<>> tx_ids_;
    std::optional<std::string> path_;
};

}  // namespace consentchain::ledger

#endif
