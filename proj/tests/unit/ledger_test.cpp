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

#include <filesystem>
#include <random>

#include "consentchain/ledger.hpp"
#include "consentchain/legalprose.hpp"
#include "../common/testnet.hpp"

using namespace consentchain;
using namespace consentchain::ledger;

namespace {

/// Independent Merkle oracle: plain recursion, duplicate-last on odd.
Hash256 merkle_oracle(const std::vector<Hash256>& leaves) {
    if (leaves.empty()) return sha256(std::string_view{});
    if (leaves.size() == 1) return leaves[0];
    std::vector<Hash256> level = leaves;
    if (level.size() % 2 != 0) level.push_back(level.back());
    std::vector<Hash256> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
        std::string buffer;
        buffer.append(reinterpret_cast<const char*>(level[i].bytes.data()), 32);
        buffer.append(reinterpret_cast<const char*>(level[i + 1].bytes.data()), 32);
        next.push_back(sha256(buffer));
    }
    return merkle_oracle(next);
}

/// A ten-block chain out of the demo lifecycle.
tests::TestNet ten_block_chain() {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);          // blocks 1..3
    net.grant_consent("citizen_bruno", 4);                        // blocks 4,5
    net.run(net.event(7, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=pp1;region=north"}));
    net.run(net.event(8, "labA-gw", "data.submit",
                      {"citizen_bruno", decl.hex(), "patient_pseudo_id=pp2;region=south"}));
    net.run(net.event(9, "citizen_bruno", "consent.revoke", {decl.hex()}));
    net.run(net.event(10, "auditor-1", "audit.history",
                      {contracts::declaration_key(decl)}));
    net.run(net.event(11, "moh-gw", "consent.request", {"citizen_clara", decl.hex()}));
    REQUIRE(net.chain.height() == 10);
    return net;
}

}  // namespace

TEST_CASE("genesis block matches the frozen golden hash") {
    Block genesis = genesis_block();
    CHECK(genesis.height == 0);
    CHECK(genesis.prev_hash.hex() == std::string(64, '0'));
    CHECK(genesis.data_hash == sha256(std::string_view{}));
    CHECK(genesis.timestamp == 0);
    CHECK(hash_block(genesis).hex() == tests::read_golden("genesis_hash.golden"));
    CHECK(hash_block(genesis) == hash_block(genesis_block()));
}

TEST_CASE("merkle root against the brute-force oracle") {
    std::mt19937 rng(5);
    std::vector<Hash256> leaves;
    for (int n = 0; n <= 9; ++n) {
        CHECK(merkle_root(leaves) == merkle_oracle(leaves));
        leaves.push_back(sha256("leaf-" + std::to_string(rng() % 1000)));
    }

    // Root of [h1,h2,h3] equals root of [h1,h2,h3,h3].
    std::vector<Hash256> three = {sha256("1"), sha256("2"), sha256("3")};
    std::vector<Hash256> padded = three;
    padded.push_back(three.back());
    CHECK(merkle_root(three) == merkle_root(padded));
}

TEST_CASE("block records round trip through canonical JSON") {
    tests::TestNet net = ten_block_chain();
    for (const Block& block : net.chain.blocks()) {
        std::string record = block_to_json(block);
        auto parsed = block_from_json(record);
        REQUIRE(parsed.ok());
        CHECK(parsed.value() == block);
        CHECK(block_to_json(parsed.value()) == record);
    }

    // A record whose self-hash disagrees is refused at load.
    std::string record = block_to_json(net.chain.blocks()[3]);
    std::size_t at = record.find("\"time\":");
    REQUIRE(at != std::string::npos);
    record.insert(at + 7, "9");
    CHECK_FALSE(block_from_json(record).ok());
}

TEST_CASE("commit rejects broken links and leaves state untouched") {
    tests::TestNet net = ten_block_chain();
    Hash256 before = net.chain.state().digest();

    Block bad;
    bad.height = net.chain.height() + 2;  // gap
    bad.prev_hash = net.chain.tip_hash();
    bad.timestamp = 99;
    bad.data_hash = compute_data_hash({});
    auto gap = net.chain.commit_block(bad, net.ctx());
    REQUIRE_FALSE(gap.ok());
    CHECK(gap.error().code == ErrorCode::BrokenLink);

    bad.height = net.chain.height() + 1;
    bad.prev_hash = sha256("not the tip");
    auto wrong_prev = net.chain.commit_block(bad, net.ctx());
    REQUIRE_FALSE(wrong_prev.ok());
    CHECK(wrong_prev.error().code == ErrorCode::BrokenLink);

    CHECK(net.chain.state().digest() == before);
}

TEST_CASE("intra-block MVCC: second write to the same key conflicts") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);

    // Two identical submits endorsed against the same snapshot.
    std::string spec = "patient_pseudo_id=pp9;region=north";
    REQUIRE(net.submit(net.event(5, "labA-gw", "data.submit",
                                 {"citizen_ana", decl.hex(), spec})));
    REQUIRE(net.submit(net.event(5, "labB-gw", "data.submit",
                                 {"citizen_ana", decl.hex(), spec})));
    auto codes = net.mine(5);
    REQUIRE(codes.size() == 2);
    CHECK(codes[0] == ValidationCode::Valid);
    CHECK(codes[1] == ValidationCode::MVCCConflict);

    // The conflicting transaction applied nothing.
    auto scan = net.chain.state().scan_prefix("record/");
    CHECK(scan.size() == 1);
}

TEST_CASE("stale reads across blocks conflict") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);

    // Endorse a submit now, but commit it only after a revoke lands.
    auto tx = net.gateway.execute(net.event(5, "labA-gw", "data.submit",
                                            {"citizen_ana", decl.hex(),
                                             "patient_pseudo_id=pp1;region=north"}),
                                  net.chain);
    REQUIRE(tx.ok());

    net.run(net.event(6, "citizen_ana", "consent.revoke", {decl.hex()}));

    REQUIRE(net.orderer.submit(std::move(tx).take(), 7));
    auto codes = net.mine(7);
    REQUIRE(codes.size() == 1);
    CHECK(codes[0] == ValidationCode::MVCCConflict);
    CHECK(net.chain.state().scan_prefix("record/").empty());
}

TEST_CASE("policy failures stay on the chain as an audit trail") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);

    auto tx = net.gateway.execute(net.event(5, "moh-gw", "consent.request",
                                            {"citizen_bruno", decl.hex()}),
                                  net.chain);
    REQUIRE(tx.ok());
    // Strip down to a single non-endorser signature: internally
    // consistent, but the 2-of-3 policy cannot be met.
    ledger::Transaction weak = std::move(tx).take();
    weak.endorsements = {contracts::endorse(*net.registry.credential("auditor-1"),
                                            weak.proposal.proposal_id, weak.rwset)};
    REQUIRE(net.orderer.submit(weak, 5));
    auto codes = net.mine(5);
    REQUIRE(codes.size() == 1);
    CHECK(codes[0] == ValidationCode::PolicyFailure);
    CHECK(net.chain.tip().txs.size() == 1);
    // Nothing applied, but the attempt is committed.
    CHECK(net.chain.state().find(
              contracts::consent_key(identity::pseudonym(net.config.network_salt,
                                                         "citizen_bruno"),
                                     decl)) == nullptr);
}

TEST_CASE("history lists valid writes in chain order") {
    tests::TestNet net = ten_block_chain();
    Hash256 decl = prose::hash_declaration(tests::fixture_declaration());
    std::string key = contracts::consent_key(
        identity::pseudonym(net.config.network_salt, "citizen_bruno"), decl);

    auto entries = net.chain.history(key);
    REQUIRE(entries.size() == 3);  // request, grant, revoke
    CHECK(entries[0].block_timestamp <= entries[1].block_timestamp);
    CHECK(entries[1].block_timestamp <= entries[2].block_timestamp);
    // Final entry equals current state.
    const auto* current = net.chain.state().find(key);
    REQUIRE(current != nullptr);
    CHECK(entries.back().value == current->value);

    CHECK(net.chain.history("record/absent/key").empty());
}

TEST_CASE("replay determinism: rebuilding state from the chain") {
    tests::TestNet net = ten_block_chain();

    Ledger rebuilt;
    for (std::size_t h = 1; h < net.chain.blocks().size(); ++h) {
        Block block = net.chain.blocks()[h];
        for (auto& tx : block.txs) tx.validation_code.reset();
        auto codes = rebuilt.commit_block(std::move(block), net.ctx());
        REQUIRE(codes.ok());
    }
    CHECK(rebuilt.state().digest() == net.chain.state().digest());
    CHECK(rebuilt.tip_hash() == net.chain.tip_hash());

    // And the assigned codes must agree with the stored ones.
    for (std::size_t h = 0; h < net.chain.blocks().size(); ++h) {
        const Block& original = net.chain.blocks()[h];
        const Block& replayed = rebuilt.blocks()[h];
        REQUIRE(original.txs.size() == replayed.txs.size());
        for (std::size_t i = 0; i < original.txs.size(); ++i)
            CHECK(original.txs[i].validation_code == replayed.txs[i].validation_code);
    }
}

TEST_CASE("verify: clean chain passes, mutations flag the right height") {
    tests::TestNet net = ten_block_chain();
    auto report = net.chain.verify(net.ctx());
    CHECK(report.ok);

    // Mutate one transaction argument in block 4.
    std::vector<Block> tampered = net.chain.blocks();
    REQUIRE_FALSE(tampered[4].txs.empty());
    tampered[4].txs[0].proposal.args[0] += "x";
    auto arg_report = Ledger::verify_blocks(tampered, net.ctx());
    CHECK_FALSE(arg_report.ok);
    CHECK(arg_report.first_bad_height == 4);

    // Mutate block 4's stored prev hash.
    tampered = net.chain.blocks();
    tampered[4].prev_hash.bytes[0] ^= 0xff;
    auto prev_report = Ledger::verify_blocks(tampered, net.ctx());
    CHECK_FALSE(prev_report.ok);
    CHECK(prev_report.first_bad_height == 4);

    // Flip a validation code.
    tampered = net.chain.blocks();
    for (auto& tx : tampered[6].txs) tx.validation_code = ValidationCode::MVCCConflict;
    auto code_report = Ledger::verify_blocks(tampered, net.ctx());
    CHECK_FALSE(code_report.ok);
    CHECK(code_report.first_bad_height == 6);

    // Tamper a write value: endorsement digests no longer match.
    tampered = net.chain.blocks();
    for (auto& tx : tampered[2].txs) {
        if (!tx.rwset.writes.empty()) tx.rwset.writes[0].value += "z";
    }
    auto write_report = Ledger::verify_blocks(tampered, net.ctx());
    CHECK_FALSE(write_report.ok);
    CHECK(write_report.first_bad_height == 2);
}

TEST_CASE("chain log: persists, reloads, and refuses corruption") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "consentchain_ledger_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string path = (dir / "chain.log").string();

    tests::TestNet net;
    {
        auto opened = Ledger::open(path);
        REQUIRE(opened.ok());
        Ledger disk = std::move(opened).take();
        Hash256 decl = net.grant_consent("citizen_ana", 1);
        (void)decl;
        // Mirror the in-memory chain onto the disk-backed one.
        for (std::size_t h = 1; h < net.chain.blocks().size(); ++h) {
            Block block = net.chain.blocks()[h];
            for (auto& tx : block.txs) tx.validation_code.reset();
            REQUIRE(disk.commit_block(std::move(block), net.ctx()).ok());
        }
        CHECK(disk.state().digest() == net.chain.state().digest());
    }

    auto reopened = Ledger::open(path);
    REQUIRE(reopened.ok());
    CHECK(reopened.value().state().digest() == net.chain.state().digest());
    CHECK(reopened.value().tip_hash() == net.chain.tip_hash());
    CHECK(reopened.value().has_tx(net.chain.blocks()[1].txs[0].tx_id));

    // Corrupt one byte inside a record: reload must fail.
    {
        std::fstream file(path, std::ios::binary | std::ios::in | std::ios::out);
        file.seekp(120);
        file.put('~');
    }
    CHECK_FALSE(Ledger::open(path).ok());
    fs::remove_all(dir);
}
