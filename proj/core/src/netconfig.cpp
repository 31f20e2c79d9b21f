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

#include "consentchain/netconfig.hpp"

#include <fstream>
#include <sstream>

#include "consentchain/canonical.hpp"

namespace consentchain {

namespace {

const std::vector<std::string> kKeys = {
    "peers",         "delays",       "batch_size",           "batch_timeout_ticks",
    "endorsement_k", "endorsers",    "network_salt",         "k_anonymity_threshold",
    "read_mode"};
const std::vector<std::string> kRequired = {"peers",         "delays",    "batch_size",
                                            "batch_timeout_ticks", "endorsement_k", "endorsers",
                                            "network_salt"};

}  // namespace

Result<NetworkConfig> NetworkConfig::parse(std::string_view text) {
    auto doc = KvDocument::parse(text, kKeys, kRequired);
    if (!doc) return doc.error();

    NetworkConfig config;
    config.peers = split_csv(doc.value().get("peers"));
    if (config.peers.empty()) return make_error(ErrorCode::BadConfig, "need at least one peer");
    for (const auto& peer : config.peers) {
        if (!is_valid_actor_id(peer)) return make_error(ErrorCode::BadConfig, "peer id: " + peer);
    }

    for (const auto& token : split_csv(doc.value().get("delays"))) {
        auto delay = parse_int64(token);
        if (!delay || *delay < 0)
            return make_error(ErrorCode::BadConfig, "delay: " + token);
        config.delays.push_back(*delay);
    }
    if (config.delays.size() != config.peers.size())
        return make_error(ErrorCode::BadConfig, "delays must match peers");

    auto batch_size = parse_int64(doc.value().get("batch_size"));
    if (!batch_size || *batch_size < 1)
        return make_error(ErrorCode::BadConfig, "batch_size must be >= 1");
    config.batch_size = *batch_size;

    auto timeout = parse_int64(doc.value().get("batch_timeout_ticks"));
    if (!timeout || *timeout < 1)
        return make_error(ErrorCode::BadConfig, "batch_timeout_ticks must be >= 1");
    config.batch_timeout_ticks = *timeout;

    auto k = parse_int64(doc.value().get("endorsement_k"));
    if (!k || *k < 1) return make_error(ErrorCode::BadConfig, "endorsement_k must be >= 1");
    config.policy.k = static_cast<int>(*k);
    for (const auto& endorser : split_csv(doc.value().get("endorsers"))) {
        if (!is_valid_actor_id(endorser))
            return make_error(ErrorCode::BadConfig, "endorser id: " + endorser);
        config.policy.endorser_set.insert(endorser);
    }
    if (config.policy.endorser_set.empty() ||
        static_cast<std::size_t>(config.policy.k) > config.policy.endorser_set.size())
        return make_error(ErrorCode::BadConfig, "endorsement_k exceeds endorser set");

    auto salt = Hash256::from_hex(doc.value().get("network_salt"));
    if (!salt) return make_error(ErrorCode::BadConfig, "network_salt must be 64 hex chars");
    config.network_salt = *salt;

    if (doc.value().has("k_anonymity_threshold")) {
        auto threshold = parse_int64(doc.value().get("k_anonymity_threshold"));
        if (!threshold || *threshold < 1)
            return make_error(ErrorCode::BadConfig, "k_anonymity_threshold must be >= 1");
        config.k_anonymity_threshold = *threshold;
    }

    if (doc.value().has("read_mode")) {
        const std::string& mode = doc.value().get("read_mode");
        if (mode == "open") {
            config.read_mode = ReadMode::Open;
        } else if (mode == "permissioned") {
            config.read_mode = ReadMode::Permissioned;
        } else {
            return make_error(ErrorCode::BadConfig, "read_mode: " + mode);
        }
    }
    return config;
}

Result<NetworkConfig> NetworkConfig::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string NetworkConfig::render() const {
    std::vector<std::string> delay_tokens;
    delay_tokens.reserve(delays.size());
    for (auto delay : delays) delay_tokens.push_back(std::to_string(delay));
    std::vector<std::string> endorsers(policy.endorser_set.begin(), policy.endorser_set.end());

    std::string out;
    out += "peers: " + join_csv(peers) + "\n";
    out += "delays: " + join_csv(delay_tokens) + "\n";
    out += "batch_size: " + std::to_string(batch_size) + "\n";
    out += "batch_timeout_ticks: " + std::to_string(batch_timeout_ticks) + "\n";
    out += "endorsement_k: " + std::to_string(policy.k) + "\n";
    out += "endorsers: " + join_csv(endorsers) + "\n";
    out += "network_salt: " + network_salt.hex() + "\n";
    out += "k_anonymity_threshold: " + std::to_string(k_anonymity_threshold) + "\n";
    out += std::string("read_mode: ") + (read_mode == ReadMode::Open ? "open" : "permissioned") +
           "\n";
    return out;
}

}  // namespace consentchain
