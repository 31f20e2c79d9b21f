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

#ifndef CONSENTCHAIN_NODE_HPP
#define CONSENTCHAIN_NODE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "consentchain/consensus.hpp"
#include "consentchain/contracts.hpp"
#include "consentchain/errors.hpp"
#include "consentchain/identity.hpp"
#include "consentchain/ledger.hpp"
#include "consentchain/netconfig.hpp"
#include "consentchain/pipeline.hpp"
#include "consentchain/workload.hpp"

namespace consentchain::node {

/// Client-side half of execute-order-validate: turns commands into
/// proposals, simulates them against the endorsement view, signs as the
/// creator and collects endorser signatures. This simulation environment
/// holds every actor's credential locally, so one gateway can act for
/// all of them.
class Gateway {
public:
    Gateway(const identity::Registry& registry, identity::PseudonymTable& pseudonyms,
            const NetworkConfig& config, pipeline::OffchainStore& store)
        : registry_(registry), pseudonyms_(pseudonyms), config_(config), store_(store) {}

    /// Simulates, signs and endorses a finished proposal against the
    /// given committed view. Governance rejections surface here.
    Result<ledger::Transaction> endorse(const contracts::TxProposal& proposal,
                                        const ledger::Ledger& view) const;

    /// Builds the proposal for one workload command (resolving subject
    /// pseudonyms, storing payloads off-chain) and endorses it.
    Result<ledger::Transaction> execute(const workload::Event& event,
                                        const ledger::Ledger& view);

    void set_proposal_seq(std::int64_t seq) { proposal_seq_ = seq; }
    std::int64_t proposal_seq() const { return proposal_seq_; }

private:
    Result<contracts::TxProposal> build_proposal(const workload::Event& event,
                                                 const ledger::Ledger& view);

    const identity::Registry& registry_;
    identity::PseudonymTable& pseudonyms_;
    const NetworkConfig& config_;
    pipeline::OffchainStore& store_;
    std::int64_t proposal_seq_ = 0;
};

/// Runs after every committed block: applies off-chain erasure for
/// superseded records and revoked consents.
void post_commit(const ledger::Ledger& ledger, const ledger::Block& block,
                 pipeline::OffchainStore& store);

/// File layout under a node home directory.
struct NodePaths {
    std::string home;

    std::string registry_file() const { return home + "/registry.txt"; }
    std::string network_file() const { return home + "/network.conf"; }
    std::string chain_file() const { return home + "/chain.log"; }
    std::string store_dir() const { return home + "/store"; }
    std::string pending_file() const { return home + "/pending.log"; }
};

/// A single operator node: registry + network config + file-backed
/// ledger + off-chain store + persisted pending queue. One process at a
/// time owns a home directory (single committer).
class Node {
public:
    static Result<Node> open(const std::string& home);

    identity::Registry& registry() { return *registry_; }
    const identity::Registry& registry() const { return *registry_; }
    const NetworkConfig& config() const { return *config_; }
    identity::PseudonymTable& pseudonyms() { return *pseudonyms_; }
    const identity::PseudonymTable& pseudonyms() const { return *pseudonyms_; }
    ledger::Ledger& chain() { return *ledger_; }
    const ledger::Ledger& chain() const { return *ledger_; }
    pipeline::OffchainStore& store() { return *store_; }
    const std::vector<ledger::Transaction>& pending() const { return pending_; }
    const NodePaths& paths() const { return paths_; }

    Gateway& gateway() { return *gateway_; }
    ledger::CommitContext commit_context() const;
    pipeline::PipelineContext pipeline_context() const;

    /// Endorsed transactions queue here until `mine`; the queue survives
    /// process restarts via pending.log.
    Result<std::string> submit(ledger::Transaction tx);

    /// Orders everything pending into blocks, validates and commits
    /// them, runs post-commit hooks, and clears the queue.
    Result<std::vector<std::pair<std::int64_t, Hash256>>> mine(std::int64_t now);

    /// Default client timestamp for interactive commands: one past the
    /// chain tip.
    std::int64_t default_now() const { return ledger_->tip().timestamp + 1; }

private:
    Node() = default;

    Status save_pending() const;

    // Heap-held so Node stays movable while Gateway and contexts keep
    // stable references.
    NodePaths paths_;
    std::unique_ptr<identity::Registry> registry_;
    std::unique_ptr<NetworkConfig> config_;
    std::unique_ptr<identity::PseudonymTable> pseudonyms_;
    std::unique_ptr<ledger::Ledger> ledger_;
    std::unique_ptr<pipeline::OffchainStore> store_;
    std::unique_ptr<Gateway> gateway_;
    std::vector<ledger::Transaction> pending_;
};

}  // namespace consentchain::node

#endif
