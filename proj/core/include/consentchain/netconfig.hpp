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

#ifndef CONSENTCHAIN_NETCONFIG_HPP
#define CONSENTCHAIN_NETCONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "consentchain/contracts.hpp"
#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"

namespace consentchain {

/// Whether read endpoints answer anyone or only registered actors.
/// Only the permissioned flavor of the underlying network is
/// implemented; this flag covers the read side.
enum class ReadMode { Open, Permissioned };

/// Network file (`network.conf`): same line rules as declarations.
/// Keys: peers, delays, batch_size, batch_timeout_ticks, endorsement_k,
/// endorsers, network_salt; optional: k_anonymity_threshold (default 2),
/// read_mode (open|permissioned, default open).
struct NetworkConfig {
    std::vector<std::string> peers;
    std::vector<std::int64_t> delays;  // orderer->peer delivery ticks, one per peer
    std::int64_t batch_size = 1;
    std::int64_t batch_timeout_ticks = 1;
    contracts::EndorsementPolicy policy;
    Hash256 network_salt;
    std::int64_t k_anonymity_threshold = 2;
    ReadMode read_mode = ReadMode::Open;

    static Result<NetworkConfig> parse(std::string_view text);
    static Result<NetworkConfig> load_file(const std::string& path);
    std::string render() const;
};

}  // namespace consentchain

#endif
