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

#ifndef CONSENTCHAIN_TESTS_FIXTURES_HPP
#define CONSENTCHAIN_TESTS_FIXTURES_HPP

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "consentchain/identity.hpp"
#include "consentchain/legalprose.hpp"
#include "consentchain/netconfig.hpp"
#include "consentchain/workload.hpp"

namespace consentchain::tests {

/// Directory with the checked-in fixtures and frozen goldens
/// (CONSENTCHAIN_FIXTURES is set by ctest).
inline std::string fixture_dir() {
    if (const char* env = std::getenv("CONSENTCHAIN_FIXTURES")) return env;
    return "tests/golden";
}

inline std::string read_fixture(const std::string& name) {
    std::string path = fixture_dir() + "/" + name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// First line of a .golden file (the frozen value).
inline std::string read_golden(const std::string& name) {
    std::string text = read_fixture(name);
    std::size_t eol = text.find('\n');
    return eol == std::string::npos ? text : text.substr(0, eol);
}

inline identity::Registry fixture_registry() {
    auto registry = identity::Registry::parse(read_fixture("registry.txt"));
    if (!registry) throw std::runtime_error(registry.error().message());
    return std::move(registry).take();
}

inline NetworkConfig fixture_config() {
    auto config = NetworkConfig::parse(read_fixture("network.conf"));
    if (!config) throw std::runtime_error(config.error().message());
    return std::move(config).take();
}

inline prose::PurposeDeclaration fixture_declaration() {
    auto declaration = prose::parse_declaration(read_fixture("sample.lprose"));
    if (!declaration) throw std::runtime_error(declaration.error().message());
    return std::move(declaration).take();
}

inline workload::Workload fixture_workload() {
    auto load = workload::parse_workload(
        read_fixture("demo.workload"),
        [](const std::string& ref) -> Result<std::string> { return read_fixture(ref); });
    if (!load) throw std::runtime_error(load.error().message());
    return std::move(load).take();
}

inline identity::Seed seed_of(std::uint8_t byte) {
    identity::Seed seed{};
    seed.fill(byte);
    return seed;
}

}  // namespace consentchain::tests

#endif
