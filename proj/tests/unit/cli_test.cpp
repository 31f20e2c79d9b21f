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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "../common/fixtures.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string stdout_text;
};

std::string cli_binary() {
    const char* bin = std::getenv("CONSENTCHAIN_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

CliResult run_cli(const std::string& args) {
    std::string command = cli_binary() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[512];
    while (std::fgets(buffer, sizeof buffer, pipe) != nullptr) output += buffer;
    int status = pclose(pipe);
    return CliResult{WEXITSTATUS(status), output};
}

std::string first_line(const std::string& text) {
    std::size_t eol = text.find('\n');
    return eol == std::string::npos ? text : text.substr(0, eol);
}

struct Home {
    fs::path dir;

    explicit Home(const std::string& name) {
        dir = fs::temp_directory_path() / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "registry.txt") << consentchain::tests::read_fixture("registry.txt");
        std::ofstream(dir / "network.conf") << consentchain::tests::read_fixture("network.conf");
        std::ofstream(dir / "sample.lprose") << consentchain::tests::read_fixture("sample.lprose");
    }
    ~Home() { fs::remove_all(dir); }

    std::string arg() const { return "--home " + dir.string(); }
    std::string decl() const { return (dir / "sample.lprose").string(); }
};

}  // namespace

TEST_CASE("prose commands") {
    Home home("consentchain_cli_prose");
    auto check = run_cli(home.arg() + " prose check " + home.decl());
    CHECK(check.exit_code == 0);
    CHECK(first_line(check.stdout_text) == "ok");

    auto hash = run_cli(home.arg() + " --json prose hash " + home.decl());
    CHECK(hash.exit_code == 0);
    json parsed = json::parse(hash.stdout_text);
    CHECK(parsed["ok"] == true);
    CHECK(parsed["hash"] == consentchain::tests::read_golden("declaration_hash.golden"));
    // The JSON surface is byte-stable.
    CHECK(first_line(hash.stdout_text) ==
          "{\"hash\":\"dde2025eff6e20fb658cf234c868a632f0d9f5552066a7e24d29f056a16b7b77\","
          "\"ok\":true}");

    std::ofstream(home.dir / "broken.lprose") << "id: x\ncontroller: moh-gw\n";
    auto broken = run_cli(home.arg() + " prose check " + (home.dir / "broken.lprose").string());
    CHECK(broken.exit_code == 1);
    CHECK(first_line(broken.stdout_text) == "MissingKey");
}

TEST_CASE("grant before request is an impartial-behavior rejection") {
    Home home("consentchain_cli_impartial");
    auto result = run_cli(home.arg() + " consent grant citizen_ana " + home.decl() + " --now 1");
    CHECK(result.exit_code == 1);
    CHECK(first_line(result.stdout_text) == "IllegalTransition");
}

TEST_CASE("full consent and data lifecycle through the CLI") {
    Home home("consentchain_cli_lifecycle");

    auto request = run_cli(home.arg() + " consent request citizen_ana " + home.decl() +
                           " --controller moh-gw --now 2 --mine");
    CHECK(request.exit_code == 0);

    auto status = run_cli(home.arg() + " --json consent status citizen_ana " + home.decl());
    CHECK(json::parse(status.stdout_text)["state"] == "Requested");

    auto grant = run_cli(home.arg() + " consent grant citizen_ana " + home.decl() +
                         " --now 3 --mine");
    CHECK(grant.exit_code == 0);

    auto granted = run_cli(home.arg() + " --json consent status citizen_ana " + home.decl());
    json granted_json = json::parse(granted.stdout_text);
    CHECK(granted_json["state"] == "Granted");
    CHECK(granted_json["granted_at"] == 3);
    CHECK(first_line(granted.stdout_text) ==
          "{\"declaration\":\"dde2025eff6e20fb658cf234c868a632f0d9f5552066a7e24d29f056a16b7b77\","
          "\"granted_at\":3,\"ok\":true,\"state\":\"Granted\",\"subject\":\"citizen_ana\"}");

    // Queue a submit without mining, then mine explicitly.
    auto submit = run_cli(home.arg() + " data submit citizen_ana " + home.decl() +
                          " --submitter labA-gw --payload 'patient_pseudo_id=p1;region=north'" +
                          " --now 4");
    CHECK(submit.exit_code == 0);
    auto mine = run_cli(home.arg() + " data mine --now 4");
    CHECK(mine.exit_code == 0);
    CHECK(first_line(mine.stdout_text).rfind("block", 0) == 0);

    auto verify = run_cli(home.arg() + " ledger verify");
    CHECK(verify.exit_code == 0);
    CHECK(first_line(verify.stdout_text) == "ok");

    auto revoke = run_cli(home.arg() + " consent revoke citizen_ana " + home.decl() +
                          " --now 5 --mine");
    CHECK(revoke.exit_code == 0);
    auto revoked = run_cli(home.arg() + " --json consent status citizen_ana " + home.decl());
    json revoked_json = json::parse(revoked.stdout_text);
    CHECK(revoked_json["state"] == "Revoked");
    CHECK(revoked_json["revoked_at"] == 5);

    // Rejected after revocation, with the governance error name on stdout.
    auto late = run_cli(home.arg() + " data submit citizen_ana " + home.decl() +
                        " --submitter labA-gw --payload 'patient_pseudo_id=p2;region=north'" +
                        " --now 6");
    CHECK(late.exit_code == 1);
    CHECK(first_line(late.stdout_text) == "ConsentRequired");

    auto history = run_cli(home.arg() + " --json ledger history consent:citizen_ana:" +
                           home.decl());
    json history_json = json::parse(history.stdout_text);
    CHECK(history_json["entries"].size() == 3);  // request, grant, revoke

    auto provenance = run_cli(home.arg() + " --json data provenance consent:citizen_ana:" +
                              home.decl());
    CHECK(json::parse(provenance.stdout_text)["entries"].size() == 3);

    auto audit = run_cli(home.arg() + " --json audit export");
    json audit_json = json::parse(audit.stdout_text);
    CHECK(audit_json["ok"] == true);
    CHECK(audit_json["lines"] == 5);  // publish, request, grant, submit, revoke
}

TEST_CASE("net run reproduces the frozen three-peer digests") {
    Home home("consentchain_cli_netrun");
    std::ofstream(home.dir / "demo.workload")
        << consentchain::tests::read_fixture("demo.workload");

    auto result = run_cli(home.arg() + " --json net run " + (home.dir / "demo.workload").string());
    REQUIRE(result.exit_code == 0);
    json parsed = json::parse(result.stdout_text);
    REQUIRE(parsed["peers"].size() == 3);

    std::string golden = consentchain::tests::read_fixture("net_digests.golden");
    for (const auto& peer : parsed["peers"]) {
        CHECK(golden.find("chain=" + peer["chain"].get<std::string>()) != std::string::npos);
        CHECK(golden.find("state=" + peer["state"].get<std::string>()) != std::string::npos);
    }
    CHECK(parsed["blocks"] == 7);
    CHECK(parsed["txs"] == 10);
    CHECK(parsed["rejections"].size() == 1);
    CHECK(parsed["rejections"][0]["error"] == "ConsentRequired");
}

TEST_CASE("id management") {
    Home home("consentchain_cli_id");
    auto org = run_cli(home.arg() + " id register labC --seed " + std::string(64, 'd'));
    CHECK(org.exit_code == 0);
    auto gateway = run_cli(home.arg() + " id register labC-gw --org labC --roles DataProcessor" +
                           " --seed " + std::string(64, 'e'));
    CHECK(gateway.exit_code == 0);

    auto duplicate = run_cli(home.arg() + " id register labC");
    CHECK(duplicate.exit_code == 1);
    CHECK(first_line(duplicate.stdout_text) == "DuplicateActor");

    auto list = run_cli(home.arg() + " --json id list");
    json parsed = json::parse(list.stdout_text);
    CHECK(parsed["actors"].size() == 14);  // 12 fixture records + 2 new
}

TEST_CASE("usage errors exit 2") {
    auto nonsense = run_cli("frobnicate");
    CHECK(nonsense.exit_code == 2);
    auto missing_args = run_cli("consent request");
    CHECK(missing_args.exit_code == 2);
}
