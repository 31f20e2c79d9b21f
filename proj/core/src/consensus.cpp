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

#include "consentchain/consensus.hpp"

#include <algorithm>

#include "consentchain/canonical.hpp"
#include "consentchain/node.hpp"
#include "consentchain/pipeline.hpp"

namespace consentchain::consensus {

Orderer::Orderer(OrdererConfig config, const identity::Registry& registry,
                 const identity::PseudonymTable& pseudonyms)
    : config_(config), registry_(registry), pseudonyms_(pseudonyms) {
    tip_hash_ = ledger::hash_block(ledger::genesis_block());
}

void Orderer::anchor(std::int64_t tip_height, const Hash256& tip_hash) {
    tip_height_ = tip_height;
    tip_hash_ = tip_hash;
}

void Orderer::mark_seen(std::string_view tx_id) { seen_.insert(std::string(tx_id)); }

Status Orderer::submit(ledger::Transaction tx, std::int64_t now_ticks) {
    if (seen_.count(tx.tx_id) != 0) return make_error(ErrorCode::DuplicateTx, tx.tx_id);

    // Creator signature must verify before anything is ordered.
    auto creator_id = pseudonyms_.resolve(tx.proposal.creator);
    if (!creator_id) return make_error(ErrorCode::BadSignature, "unknown creator");
    auto verified = registry_.verify(
        *creator_id, contracts::canonical_proposal_bytes(tx.proposal), tx.creator_signature);
    if (!verified || !verified.value())
        return make_error(ErrorCode::BadSignature, "creator signature invalid");

    // Keep only endorsements that verify against this transaction's own
    // rwset; whatever reaches the chain is internally consistent.
    const Hash256 digest = contracts::rwset_digest(tx.rwset);
    std::vector<contracts::Endorsement> kept;
    for (auto& endorsement : tx.endorsements) {
        if (endorsement.rwset_digest != digest) continue;
        auto endorsement_ok = registry_.verify(
            endorsement.endorser,
            contracts::endorsement_message(tx.proposal.proposal_id, endorsement.rwset_digest),
            endorsement.signature);
        if (!endorsement_ok || !endorsement_ok.value()) continue;
        kept.push_back(std::move(endorsement));
    }
    if (kept.empty()) return make_error(ErrorCode::NotEndorsed, tx.tx_id);
    tx.endorsements = std::move(kept);

    seen_.insert(tx.tx_id);
    queue_.emplace_back(std::move(tx), now_ticks);
    return ok_status();
}

std::optional<ledger::Block> Orderer::cut_block(std::int64_t now_ticks, bool force) {
    if (queue_.empty()) return std::nullopt;  // no empty blocks, ever

    bool batch_full = static_cast<std::int64_t>(queue_.size()) >= config_.batch_size;
    bool timed_out = now_ticks - queue_.front().second >= config_.batch_timeout_ticks;
    if (!batch_full && !timed_out && !force) return std::nullopt;

    std::size_t take = std::min<std::size_t>(queue_.size(),
                                             static_cast<std::size_t>(config_.batch_size));
    ledger::Block block;
    block.height = tip_height_ + 1;
    block.prev_hash = tip_hash_;
    block.timestamp = now_ticks;
    block.txs.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        block.txs.push_back(std::move(queue_.front().first));
        queue_.pop_front();
    }
    block.data_hash = ledger::compute_data_hash(block.txs);

    tip_height_ = block.height;
    tip_hash_ = ledger::hash_block(block);
    return block;
}

NetworkTopology NetworkTopology::from_config(const NetworkConfig& config) {
    return NetworkTopology{config.peers, config.delays};
}

RoundOutcome run_network_round(const NetworkTopology& topology, const NetworkConfig& config,
                               const identity::Registry& bootstrap,
                               const workload::Workload& load, std::int64_t ticks) {
    RoundOutcome outcome;

    identity::Registry registry = bootstrap;
    identity::PseudonymTable pseudonyms(config.network_salt);
    pseudonyms.refresh(registry);

    // Gateway-side zero-delay replica: the snapshot endorsements are
    // simulated against, and the erasure-hook driver.
    ledger::Ledger endorsement_view;
    pipeline::OffchainStore store;
    node::Gateway gateway(registry, pseudonyms, config, store);

    std::vector<ledger::Ledger> peers(topology.peer_ids.size());
    ledger::CommitContext commit_context{registry, pseudonyms, config.policy};

    Orderer orderer(OrdererConfig{config.batch_size, config.batch_timeout_ticks}, registry,
                    pseudonyms);

    // One reliable in-order link per peer: (due_tick, block).
    std::vector<std::deque<std::pair<std::int64_t, ledger::Block>>> links(peers.size());
    auto links_drained = [&links] {
        return std::all_of(links.begin(), links.end(),
                           [](const auto& link) { return link.empty(); });
    };

    std::vector<workload::Event> events = load.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& a, const auto& b) { return a.tick < b.tick; });
    std::size_t next_event = 0;

    std::int64_t last_event_tick = events.empty() ? 0 : events.back().tick;
    std::int64_t horizon = std::max(ticks, last_event_tick + config.batch_timeout_ticks + 1);
    std::int64_t max_delay = 0;
    for (auto delay : topology.delays) max_delay = std::max(max_delay, delay);

    for (std::int64_t t = 0;; ++t) {
        // 1. deliveries due by t, per peer, in emission order.
        for (std::size_t peer = 0; peer < peers.size(); ++peer) {
            while (!links[peer].empty() && links[peer].front().first <= t) {
                auto codes = peers[peer].commit_block(links[peer].front().second,
                                                      commit_context);
                (void)codes;  // links are reliable and blocks well-formed
                links[peer].pop_front();
            }
        }

        // 2. workload events at t: simulate/endorse against the
        //    gateway view, then hand to the orderer.
        while (next_event < events.size() && events[next_event].tick == t) {
            const workload::Event& event = events[next_event];
            auto tx = gateway.execute(event, endorsement_view);
            if (!tx) {
                outcome.rejections.emplace_back(next_event, std::string(tx.error().name()));
            } else {
                auto accepted = orderer.submit(std::move(tx).take(), t);
                if (!accepted)
                    outcome.rejections.emplace_back(next_event,
                                                    std::string(accepted.error().name()));
            }
            ++next_event;
        }

        // 3. cut whatever is due; commit to the gateway view at once and
        //    schedule per-peer deliveries.
        while (auto block = orderer.cut_block(t)) {
            ++outcome.blocks_cut;
            outcome.txs_committed += static_cast<std::int64_t>(block->txs.size());
            auto codes = endorsement_view.commit_block(*block, commit_context);
            (void)codes;
            node::post_commit(endorsement_view, endorsement_view.tip(), store);
            for (std::size_t peer = 0; peer < peers.size(); ++peer) {
                links[peer].emplace_back(t + topology.delays[peer], *block);
            }
        }

        // Quiescence: past the horizon with nothing queued or in flight.
        if (t >= horizon && orderer.queue_size() == 0 && links_drained()) break;
        // Safety valve so a malformed setup cannot spin forever.
        if (t > horizon + max_delay + config.batch_timeout_ticks + 8) break;
    }

    for (std::size_t peer = 0; peer < peers.size(); ++peer) {
        PeerOutcome result;
        result.peer_id = topology.peer_ids[peer];
        result.chain_hash = peers[peer].tip_hash();
        result.state_digest = peers[peer].state().digest();
        for (const auto& block : peers[peer].blocks()) {
            for (const auto& tx : block.txs) {
                result.codes.emplace_back(
                    tx.tx_id,
                    tx.validation_code.value_or(ledger::ValidationCode::PolicyFailure));
            }
        }
        outcome.peers.push_back(std::move(result));
    }
    outcome.reference_chain = endorsement_view.blocks();
    outcome.store = std::move(store);
    return outcome;
}

}  // namespace consentchain::consensus
