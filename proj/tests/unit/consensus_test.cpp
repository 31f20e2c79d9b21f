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

#include <doctest.h>

#include <random>

#include "consentchain/consensus.hpp"
#include "../common/generators.hpp"
#include "../common/testnet.hpp"

using namespace consentchain;
using namespace consentchain::consensus;

TEST_CASE("orderer cuts a full batch immediately") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);
    (void)decl;

    // Queue three distinct requests at one tick (batch_size is 3).
    Hash256 hash = prose::hash_declaration(tests::fixture_declaration());
    REQUIRE(net.submit(net.event(5, "moh-gw", "consent.request",
                                 {"citizen_bruno", hash.hex()})));
    CHECK(net.orderer.queue_size() == 1);
    CHECK_FALSE(net.orderer.cut_block(5).has_value());  // not full, not timed out
    REQUIRE(net.submit(net.event(5, "moh-gw", "consent.request",
                                 {"citizen_clara", hash.hex()})));
    REQUIRE(net.submit(net.event(5, "moh-gw", "consent.request",
                                 {"citizen_davi", hash.hex()})));

    auto block = net.orderer.cut_block(5);
    REQUIRE(block.has_value());
    CHECK(block->txs.size() == 3);
    CHECK(net.orderer.queue_size() == 0);
    CHECK(block->data_hash == ledger::compute_data_hash(block->txs));
    REQUIRE(net.chain.commit_block(*block, net.ctx()).ok());
}

TEST_CASE("orderer timeout cuts a partial batch, never an empty block") {
    tests::TestNet net;
    Hash256 hash = net.grant_consent("citizen_ana", 1);

    CHECK_FALSE(net.orderer.cut_block(100).has_value());  // empty queue

    REQUIRE(net.submit(net.event(10, "moh-gw", "consent.request",
                                 {"citizen_bruno", hash.hex()})));
    CHECK_FALSE(net.orderer.cut_block(11).has_value());  // waited 1 < 2
    auto block = net.orderer.cut_block(12);              // waited 2 >= 2
    REQUIRE(block.has_value());
    CHECK(block->txs.size() == 1);
}

TEST_CASE("admission: duplicates, missing endorsements, bad signatures") {
    tests::TestNet net;
    Hash256 hash = net.grant_consent("citizen_ana", 1);

    auto tx = net.gateway.execute(net.event(5, "moh-gw", "consent.request",
                                            {"citizen_bruno", hash.hex()}),
                                  net.chain);
    REQUIRE(tx.ok());

    REQUIRE(net.orderer.submit(tx.value(), 5));
    auto duplicate = net.orderer.submit(tx.value(), 5);
    REQUIRE_FALSE(duplicate.ok());
    CHECK(duplicate.error().code == ErrorCode::DuplicateTx);

    auto naked = net.gateway.execute(net.event(6, "moh-gw", "consent.request",
                                               {"citizen_clara", hash.hex()}),
                                     net.chain);
    REQUIRE(naked.ok());
    ledger::Transaction stripped = std::move(naked).take();
    stripped.endorsements.clear();
    auto rejected = net.orderer.submit(stripped, 6);
    REQUIRE_FALSE(rejected.ok());
    CHECK(rejected.error().code == ErrorCode::NotEndorsed);

    auto forged = net.gateway.execute(net.event(7, "moh-gw", "consent.request",
                                                {"citizen_davi", hash.hex()}),
                                      net.chain);
    REQUIRE(forged.ok());
    ledger::Transaction bent = std::move(forged).take();
    bent.creator_signature.bytes[0] ^= 1;
    auto bad_sig = net.orderer.submit(bent, 7);
    REQUIRE_FALSE(bad_sig.ok());
    CHECK(bad_sig.error().code == ErrorCode::BadSignature);

    // Endorsements that do not match the rwset are dropped at admission;
    // with none left the transaction is refused.
    auto mismatched = net.gateway.execute(net.event(8, "moh-gw", "consent.request",
                                                    {"citizen_davi", hash.hex()}),
                                          net.chain);
    REQUIRE(mismatched.ok());
    ledger::Transaction warped = std::move(mismatched).take();
    for (auto& endorsement : warped.endorsements) endorsement.rwset_digest.bytes[5] ^= 1;
    auto dropped = net.orderer.submit(warped, 8);
    REQUIRE_FALSE(dropped.ok());
    CHECK(dropped.error().code == ErrorCode::NotEndorsed);
}

TEST_CASE("three peers converge on the demo workload") {
    auto registry = tests::fixture_registry();
    auto config = tests::fixture_config();
    auto load = tests::fixture_workload();

    RoundOutcome outcome = run_network_round(NetworkTopology::from_config(config), config,
                                             registry, load, 0);
    REQUIRE(outcome.peers.size() == 3);
    CHECK(outcome.blocks_cut == 7);
    CHECK(outcome.txs_committed == 10);
    REQUIRE(outcome.rejections.size() == 1);
    CHECK(outcome.rejections[0].second == "ConsentRequired");

    // Digests are frozen from the first reference run.
    std::string golden = tests::read_fixture("net_digests.golden");
    CHECK(golden.find("chain=" + outcome.peers[0].chain_hash.hex()) != std::string::npos);
    CHECK(golden.find("state=" + outcome.peers[0].state_digest.hex()) != std::string::npos);

    for (const auto& peer : outcome.peers) {
        CHECK(peer.chain_hash == outcome.peers[0].chain_hash);
        CHECK(peer.state_digest == outcome.peers[0].state_digest);
        CHECK(peer.codes == outcome.peers[0].codes);
    }
}

TEST_CASE("gateway rejections carry the precise governance error") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);
    net.run(net.event(4, "moh-gw", "consent.request", {"citizen_bruno", decl.hex()}));

    // Bruno's pending request answered by clara: the record is bruno's.
    auto imposter = net.gateway.execute(
        net.event(5, "citizen_clara", "consent.respond", {"citizen_bruno", decl.hex(), "grant"}),
        net.chain);
    REQUIRE_FALSE(imposter.ok());
    CHECK(imposter.error().code == ErrorCode::NotTheSubject);

    // Same shape for a foreign revocation of ana's grant.
    auto foreign = net.gateway.execute(
        net.event(5, "citizen_clara", "consent.revoke", {"citizen_ana", decl.hex()}),
        net.chain);
    REQUIRE_FALSE(foreign.ok());
    CHECK(foreign.error().code == ErrorCode::NotTheSubject);

    // Unknown contracts and actions resolve distinctly.
    auto contract = net.gateway.execute(net.event(5, "moh-gw", "escrow.create", {}), net.chain);
    REQUIRE_FALSE(contract.ok());
    CHECK(contract.error().code == ErrorCode::UnknownContract);
    auto action = net.gateway.execute(net.event(5, "moh-gw", "consent.frobnicate", {}),
                                      net.chain);
    REQUIRE_FALSE(action.ok());
    CHECK(action.error().code == ErrorCode::UnknownAction);
}

TEST_CASE("an empty workload leaves every peer at genesis") {
    auto registry = tests::fixture_registry();
    auto config = tests::fixture_config();
    config.peers = {"solo"};
    config.delays = {0};

    RoundOutcome outcome = run_network_round(NetworkTopology::from_config(config), config,
                                             registry, workload::Workload{}, 5);
    REQUIRE(outcome.peers.size() == 1);
    CHECK(outcome.blocks_cut == 0);
    CHECK(outcome.peers[0].chain_hash == ledger::hash_block(ledger::genesis_block()));
    CHECK(outcome.peers[0].state_digest == ledger::WorldState{}.digest());
    CHECK(outcome.peers[0].codes.empty());
}

TEST_CASE("single-peer reference assigns identical codes") {
    auto registry = tests::fixture_registry();
    auto config = tests::fixture_config();

    std::mt19937 rng(99);
    tests::GeneratorOptions options;
    options.target_accepted = 40;
    options.conflict_heavy = true;  // make sure MVCC conflicts appear
    tests::WorkloadGenerator generator(rng, options);
    auto generated = generator.generate();

    RoundOutcome multi = run_network_round(NetworkTopology::from_config(config), config,
                                           registry, generated.load, 0);

    NetworkConfig single = config;
    single.peers = {config.peers[0]};
    single.delays = {0};
    RoundOutcome reference = run_network_round(NetworkTopology::from_config(single), single,
                                               registry, generated.load, 0);

    REQUIRE(reference.peers.size() == 1);
    bool saw_conflict = false;
    for (const auto& [tx_id, code] : reference.peers[0].codes)
        if (code == ledger::ValidationCode::MVCCConflict) saw_conflict = true;
    CHECK(saw_conflict);

    for (const auto& peer : multi.peers) {
        CHECK(peer.codes == reference.peers[0].codes);
        CHECK(peer.state_digest == reference.peers[0].state_digest);
    }
}

TEST_CASE("every accepted transaction lands in exactly one block") {
    auto registry = tests::fixture_registry();
    auto config = tests::fixture_config();

    std::mt19937 rng(7);
    tests::GeneratorOptions options;
    options.target_accepted = 60;
    tests::WorkloadGenerator generator(rng, options);
    auto generated = generator.generate();

    RoundOutcome outcome = run_network_round(NetworkTopology::from_config(config), config,
                                             registry, generated.load, 0);
    CHECK(outcome.txs_committed == generated.expected_accepted);
    CHECK(static_cast<int>(outcome.rejections.size()) == generated.expected_rejected);

    std::set<std::string> seen;
    for (const auto& block : outcome.reference_chain) {
        CHECK((block.height == 0 || !block.txs.empty()));  // no empty blocks
        for (const auto& tx : block.txs) CHECK(seen.insert(tx.tx_id).second);
    }
    CHECK(static_cast<std::int64_t>(seen.size()) == outcome.txs_committed);
}

TEST_CASE("the simulation is deterministic run to run") {
    auto registry = tests::fixture_registry();
    auto config = tests::fixture_config();

    std::mt19937 rng_a(1234);
    tests::GeneratorOptions options;
    options.target_accepted = 30;
    tests::WorkloadGenerator gen_a(rng_a, options);
    auto load_a = gen_a.generate();
    std::mt19937 rng_b(1234);
    tests::WorkloadGenerator gen_b(rng_b, options);
    auto load_b = gen_b.generate();

    auto first = run_network_round(NetworkTopology::from_config(config), config, registry,
                                   load_a.load, 0);
    auto second = run_network_round(NetworkTopology::from_config(config), config, registry,
                                    load_b.load, 0);
    REQUIRE(first.peers.size() == second.peers.size());
    CHECK(first.peers[0].chain_hash == second.peers[0].chain_hash);
    CHECK(first.peers[0].codes == second.peers[0].codes);
}
