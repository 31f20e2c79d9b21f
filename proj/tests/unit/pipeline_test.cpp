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

#include "consentchain/pipeline.hpp"
#include "consentchain/ledger.hpp"
#include "../common/testnet.hpp"

using namespace consentchain;
using namespace consentchain::pipeline;

namespace {

Payload payload_of(std::initializer_list<std::pair<std::string, std::string>> items) {
    Payload out;
    for (const auto& [field, value] : items) out.emplace(field, value);
    return out;
}

}  // namespace

TEST_CASE("canonical payload bytes: sorted, escaped, content-addressed") {
    Payload payload = payload_of({{"result", "positive"}, {"region", "north,east\nline"}});
    auto bytes = canonical_payload_bytes(payload);
    REQUIRE(bytes.ok());
    CHECK(bytes.value() == "region=north\\,east\\nline\nresult=positive\n");

    auto parsed = parse_payload(bytes.value());
    REQUIRE(parsed.ok());
    CHECK(parsed.value() == payload);

    auto bad = canonical_payload_bytes(payload_of({{"Phone", "x"}}));
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error().code == ErrorCode::BadFieldName);
}

TEST_CASE("offchain store: directory persistence and erasure") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "consentchain_store_test";
    fs::remove_all(dir);

    Payload payload = payload_of({{"region", "north"}, {"result", "positive"}});
    Hash256 hash;
    {
        auto store = OffchainStore::open(dir.string());
        REQUIRE(store.ok());
        auto put = store.value().put(payload);
        REQUIRE(put.ok());
        hash = put.value();
        CHECK(store.value().contains(hash));
        CHECK(store.value().size() == 1);
        // Idempotent put.
        CHECK(store.value().put(payload).value() == hash);
        CHECK(store.value().size() == 1);
    }

    auto reopened = OffchainStore::open(dir.string());
    REQUIRE(reopened.ok());
    CHECK(reopened.value().get(hash) == std::optional<Payload>(payload));
    CHECK(reopened.value().fields_of(hash) ==
          std::optional<std::vector<std::string>>({"region", "result"}));

    CHECK(reopened.value().erase(hash));
    CHECK_FALSE(reopened.value().contains(hash));
    CHECK_FALSE(reopened.value().erase(hash));
    CHECK_FALSE(fs::exists(dir / hash.hex()));
    fs::remove_all(dir);
}

TEST_CASE("submit checks run in a fixed order: role, consent, fields") {
    tests::TestNet net;
    auto declaration = tests::fixture_declaration();
    Payload payload = payload_of({{"region", "north"}, {"phone_number", "555"}});

    // A citizen submitter with no consent and a bad payload: the role
    // check answers first.
    auto as_citizen = submit_health_record(net.pipe(), "citizen_bruno", "citizen_ana",
                                           declaration, payload, 5, "p1");
    REQUIRE_FALSE(as_citizen.ok());
    CHECK(as_citizen.error().code == ErrorCode::RoleDenied);

    // Valid submitter, no consent yet: consent answers before fields.
    auto no_consent = submit_health_record(net.pipe(), "labA-gw", "citizen_ana", declaration,
                                           payload, 5, "p2");
    REQUIRE_FALSE(no_consent.ok());
    CHECK(no_consent.error().code == ErrorCode::ConsentRequired);

    // Grant consent: now the field check finally fires.
    net.grant_consent("citizen_ana", 1);
    auto wide = submit_health_record(net.pipe(), "labA-gw", "citizen_ana", declaration,
                                     payload, 5, "p3");
    REQUIRE_FALSE(wide.ok());
    CHECK(wide.error().code == ErrorCode::MinimizationViolation);
    CHECK(wide.error().detail == "phone_number");

    // And a clean submit stores the payload and emits the proposal.
    std::size_t before = net.store.size();
    auto ok = submit_health_record(net.pipe(), "labA-gw", "citizen_ana", declaration,
                                   payload_of({{"region", "north"}}), 5, "p4");
    REQUIRE(ok.ok());
    CHECK(net.store.size() == before + 1);
    CHECK(ok.value().contract == contracts::ContractName::Data);
    CHECK(ok.value().action == "submit");
    CHECK(ok.value().creator == "labA-gw");
}

TEST_CASE("read_own_records: pseudonym scoping and erasure markers") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);
    net.grant_consent("citizen_bruno", 4);

    net.run(net.event(7, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a1;region=north"}));
    net.run(net.event(8, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a2;region=south"}));
    net.run(net.event(9, "labA-gw", "data.submit",
                      {"citizen_bruno", decl.hex(), "patient_pseudo_id=b1;region=north"}));

    auto ana = read_own_records(net.pipe(), "citizen_ana", 10);
    REQUIRE(ana.ok());
    CHECK(ana.value().size() == 2);
    for (const auto& record : ana.value()) {
        CHECK_FALSE(record.erased);
        REQUIRE(record.payload.has_value());
    }

    auto clara = read_own_records(net.pipe(), "citizen_clara", 10);
    REQUIRE(clara.ok());
    CHECK(clara.value().empty());

    // Bruno revokes: his payload is erased, the on-chain ref stays.
    net.run(net.event(11, "citizen_bruno", "consent.revoke", {decl.hex()}));
    auto bruno = read_own_records(net.pipe(), "citizen_bruno", 12);
    REQUIRE(bruno.ok());
    REQUIRE(bruno.value().size() == 1);
    CHECK(bruno.value()[0].erased);
    CHECK_FALSE(bruno.value()[0].payload.has_value());

    auto org = read_own_records(net.pipe(), "labA-gw", 12);
    REQUIRE_FALSE(org.ok());
    CHECK(org.error().code == ErrorCode::RoleDenied);
}

TEST_CASE("aggregates: grouping, suppression threshold, unknown field") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);
    net.grant_consent("citizen_bruno", 4);
    net.grant_consent("citizen_clara", 7);
    net.grant_consent("citizen_davi", 10);

    net.run(net.event(13, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a;region=north"}));
    net.run(net.event(14, "labA-gw", "data.submit",
                      {"citizen_bruno", decl.hex(), "patient_pseudo_id=b;region=north"}));
    net.run(net.event(15, "labB-gw", "data.submit",
                      {"citizen_clara", decl.hex(), "patient_pseudo_id=c;region=north"}));
    net.run(net.event(16, "labB-gw", "data.submit",
                      {"citizen_davi", decl.hex(), "patient_pseudo_id=d;region=south"}));

    // 3x north, 1x south, threshold 2: south is suppressed.
    auto counts = query_aggregate(net.pipe(), "auditor-1", "region", decl, 17);
    REQUIRE(counts.ok());
    CHECK(counts.value() == std::map<std::string, std::int64_t>{{"north", 3}});

    auto unknown = query_aggregate(net.pipe(), "auditor-1", "blood_type", decl, 17);
    REQUIRE_FALSE(unknown.ok());
    CHECK(unknown.error().code == ErrorCode::UnknownField);

    auto nobody = query_aggregate(net.pipe(), "ghost", "region", decl, 17);
    REQUIRE_FALSE(nobody.ok());
    CHECK(nobody.error().code == ErrorCode::UnknownActor);

    // Querying before any submission sees nothing.
    auto early = query_aggregate(net.pipe(), "auditor-1", "region", decl, 12);
    REQUIRE(early.ok());
    CHECK(early.value().empty());
}

TEST_CASE("revocation and retention exclude records from aggregates") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);
    net.grant_consent("citizen_bruno", 4);

    net.run(net.event(7, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a;region=north"}));
    net.run(net.event(8, "labA-gw", "data.submit",
                      {"citizen_bruno", decl.hex(), "patient_pseudo_id=b;region=north"}));

    tests::TestNet* n = &net;  // threshold is 2; both needed for "north"
    auto counts = query_aggregate(n->pipe(), "auditor-1", "region", decl, 9);
    REQUIRE(counts.ok());
    CHECK(counts.value() == std::map<std::string, std::int64_t>{{"north", 2}});

    // Everyone revokes: nothing may contribute afterwards.
    net.run(net.event(10, "citizen_ana", "consent.revoke", {decl.hex()}));
    net.run(net.event(11, "citizen_bruno", "consent.revoke", {decl.hex()}));
    auto after = query_aggregate(net.pipe(), "auditor-1", "region", decl, 12);
    REQUIRE(after.ok());
    CHECK(after.value().empty());

    // Retention: the sample declaration keeps records 180 days.
    tests::TestNet fresh;
    Hash256 decl2 = fresh.grant_consent("citizen_ana", 1);
    fresh.grant_consent("citizen_bruno", 4);
    fresh.run(fresh.event(7, "labA-gw", "data.submit",
                          {"citizen_ana", decl2.hex(), "patient_pseudo_id=a;region=north"}));
    fresh.run(fresh.event(7, "labA-gw", "data.submit",
                          {"citizen_bruno", decl2.hex(), "patient_pseudo_id=b;region=north"}));
    auto inside = query_aggregate(fresh.pipe(), "auditor-1", "region", decl2, 7 + 180);
    REQUIRE(inside.ok());
    CHECK(inside.value() == std::map<std::string, std::int64_t>{{"north", 2}});
    auto expired = query_aggregate(fresh.pipe(), "auditor-1", "region", decl2, 7 + 181);
    REQUIRE(expired.ok());
    CHECK(expired.value().empty());
}

TEST_CASE("rectification supersedes and erases the old payload") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);

    net.run(net.event(5, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a;region=north"}));
    auto records = read_own_records(net.pipe(), "citizen_ana", 6);
    REQUIRE(records.ok());
    REQUIRE(records.value().size() == 1);
    Hash256 old_payload = records.value()[0].ref.payload_hash;

    net.run(net.event(7, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a;region=south",
                       old_payload.hex()}));

    CHECK_FALSE(net.store.contains(old_payload));  // erased off-chain
    auto after = read_own_records(net.pipe(), "citizen_ana", 8);
    REQUIRE(after.ok());
    REQUIRE(after.value().size() == 2);  // both refs remain on-chain
    int erased = 0;
    for (const auto& record : after.value()) {
        if (record.erased) ++erased;
        if (record.ref.supersedes) CHECK(*record.ref.supersedes == old_payload);
    }
    CHECK(erased == 1);
}

TEST_CASE("provenance includes rejected attempts") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);

    // A duplicate pair endorsed against one snapshot: the second lands
    // on-chain as MVCCConflict.
    std::string spec = "patient_pseudo_id=a;region=north";
    REQUIRE(net.submit(net.event(5, "labA-gw", "data.submit",
                                 {"citizen_ana", decl.hex(), spec})));
    REQUIRE(net.submit(net.event(5, "labB-gw", "data.submit",
                                 {"citizen_ana", decl.hex(), spec})));
    net.mine(5);

    auto records = read_own_records(net.pipe(), "citizen_ana", 6);
    REQUIRE(records.ok());
    REQUIRE(records.value().size() == 1);
    std::string key =
        contracts::record_key(records.value()[0].ref.subject_pseudonym,
                              records.value()[0].ref.payload_hash);

    auto entries = provenance_of(net.pipe(), "auditor-1", key);
    REQUIRE(entries.ok());
    REQUIRE(entries.value().size() == 2);
    CHECK(entries.value()[0].actor == "labA-gw");
    CHECK(entries.value()[0].validation_code == ledger::ValidationCode::Valid);
    CHECK(entries.value()[1].actor == "labB-gw");
    CHECK(entries.value()[1].validation_code == ledger::ValidationCode::MVCCConflict);

    auto missing = provenance_of(net.pipe(), "auditor-1", "record/none/none");
    REQUIRE_FALSE(missing.ok());
    CHECK(missing.error().code == ErrorCode::UnknownKey);
}

TEST_CASE("erasure reconciliation replays revocations by version, sparing re-grants") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);

    net.run(net.event(5, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a;region=north"}));
    net.run(net.event(6, "citizen_ana", "consent.revoke", {decl.hex()}));
    // Fresh cycle after the revocation: this record must survive.
    net.run(net.event(7, "moh-gw", "consent.request", {"citizen_ana", decl.hex()}));
    net.run(net.event(8, "citizen_ana", "consent.respond", {decl.hex(), "grant"}));
    net.run(net.event(9, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=b;region=south"}));

    Hash256 old_payload = payload_hash(
        canonical_payload_bytes(payload_of({{"patient_pseudo_id", "a"},
                                            {"region", "north"}})).value());
    Hash256 new_payload = payload_hash(
        canonical_payload_bytes(payload_of({{"patient_pseudo_id", "b"},
                                            {"region", "south"}})).value());

    // Live hooks already erased the pre-revocation payload.
    CHECK_FALSE(net.store.contains(old_payload));
    CHECK(net.store.contains(new_payload));

    // Crash recovery: a store where no hook ever ran must reconcile to
    // the same outcome.
    OffchainStore recovered;
    REQUIRE(recovered.put(payload_of({{"patient_pseudo_id", "a"}, {"region", "north"}})).ok());
    REQUIRE(recovered.put(payload_of({{"patient_pseudo_id", "b"}, {"region", "south"}})).ok());
    reconcile_erasures(net.chain.blocks(), recovered);
    CHECK_FALSE(recovered.contains(old_payload));
    CHECK(recovered.contains(new_payload));

    // And reconciling an already-clean store changes nothing.
    std::size_t before = net.store.size();
    reconcile_erasures(net.chain.blocks(), net.store);
    CHECK(net.store.size() == before);
    CHECK(net.store.contains(new_payload));
}

TEST_CASE("no raw data-subject id ever reaches the chain bytes") {
    tests::TestNet net;
    Hash256 decl = net.grant_consent("citizen_ana", 1);
    net.grant_consent("citizen_bruno", 4);
    net.run(net.event(7, "labA-gw", "data.submit",
                      {"citizen_ana", decl.hex(), "patient_pseudo_id=a;region=north"}));
    net.run(net.event(8, "citizen_ana", "consent.revoke", {decl.hex()}));

    std::string chain_bytes;
    for (const auto& block : net.chain.blocks()) chain_bytes += ledger::block_to_json(block);
    chain_bytes += net.chain.state().digest_lines();

    for (const char* subject : {"citizen_ana", "citizen_bruno", "citizen_clara"}) {
        CHECK(chain_bytes.find(subject) == std::string::npos);
    }
    // Institutional actors are visible by design.
    CHECK(chain_bytes.find("labA-gw") != std::string::npos);
}
