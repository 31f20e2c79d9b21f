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

#ifndef CONSENTCHAIN_CONSENSUS_HPP
#define CONSENTCHAIN_CONSENSUS_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"
#include "consentchain/identity.hpp"
#include "consentchain/ledger.hpp"
#include "consentchain/netconfig.hpp"
#include "consentchain/pipeline.hpp"
#include "consentchain/workload.hpp"

namespace consentchain::consensus {

struct OrdererConfig {
    std::int64_t batch_size = 1;
    std::int64_t batch_timeout_ticks = 1;
};

/// Single crash-free logical orderer: FIFO queue, batch-or-timeout block
/// cutting, no empty blocks. Admission is a sanity gate, not the policy
/// check: duplicates are rejected, endorsements that do not verify
/// against the transaction's own rwset are dropped (none left -> reject),
/// and an unverifiable creator signature rejects outright. Everything
/// else is decided at validation.
class Orderer {
public:
    Orderer(OrdererConfig config, const identity::Registry& registry,
            const identity::PseudonymTable& pseudonyms);

    Status submit(ledger::Transaction tx, std::int64_t now_ticks);

    /// Emits the next block when the batch is full, or when the oldest
    /// queued transaction has waited batch_timeout_ticks (`force` cuts a
    /// partial batch immediately). Never emits an empty block. Call in a
    /// loop until it returns nothing.
    std::optional<ledger::Block> cut_block(std::int64_t now_ticks, bool force = false);

    std::size_t queue_size() const { return queue_.size(); }
    std::int64_t tip_height() const { return tip_height_; }

    /// Re-anchors the orderer on an existing chain tip (CLI restart) and
    /// marks already-committed tx ids as seen.
    void anchor(std::int64_t tip_height, const Hash256& tip_hash);
    void mark_seen(std::string_view tx_id);

private:
    OrdererConfig config_;
    const identity::Registry& registry_;
    const identity::PseudonymTable& pseudonyms_;
    std::deque<std::pair<ledger::Transaction, std::int64_t>> queue_;
    std::set<std::string, std::less<>> seen_;
    std::int64_t tip_height_ = 0;
    Hash256 tip_hash_;
};

struct NetworkTopology {
    std::vector<std::string> peer_ids;
    std::vector<std::int64_t> delays;

    static NetworkTopology from_config(const NetworkConfig& config);
};

struct PeerOutcome {
    std::string peer_id;
    Hash256 chain_hash;    // tip block hash
    Hash256 state_digest;
    std::vector<std::pair<std::string, ledger::ValidationCode>> codes;  // chain order
};

struct RoundOutcome {
    std::vector<PeerOutcome> peers;
    /// Gateway-level governance rejections: (event index, error name).
    std::vector<std::pair<std::size_t, std::string>> rejections;
    std::int64_t blocks_cut = 0;
    std::int64_t txs_committed = 0;
    /// The gateway-side view after the round, for external oracles:
    /// the committed chain and the off-chain store (post erasure hooks).
    std::vector<ledger::Block> reference_chain;
    pipeline::OffchainStore store;
};

/// Deterministic discrete-event simulation of one network: drives
/// simulate -> endorse -> order -> deliver -> validate/commit across all
/// peers under a logical tick clock, then runs to quiescence so every
/// cut block reaches every peer. Endorsement runs against a zero-delay
/// gateway-side replica, so all endorsements of a proposal share one
/// snapshot regardless of peer delays.
RoundOutcome run_network_round(const NetworkTopology& topology, const NetworkConfig& config,
                               const identity::Registry& bootstrap,
                               const workload::Workload& load, std::int64_t ticks);

}  // namespace consentchain::consensus

#endif
