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

#ifndef CONSENTCHAIN_HASH_HPP
#define CONSENTCHAIN_HASH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace consentchain {

/// 32-byte SHA-256 digest. Every content address in the system
/// (declaration hashes, tx ids, block hashes, pseudonyms, payload
/// hashes) is one of these.
struct Hash256 {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Hash256&) const = default;

    /// Lowercase 64-char hex.
    std::string hex() const;

    bool is_zero() const;

    static Hash256 zero() { return Hash256{}; }
    static std::optional<Hash256> from_hex(std::string_view hex);
};

/// One-shot SHA-256.
Hash256 sha256(std::string_view data);
Hash256 sha256(const std::uint8_t* data, std::size_t len);

/// Streaming SHA-256 (OpenSSL EVP behind the scenes).
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::string_view data);
    Sha256& update(const std::uint8_t* data, std::size_t len);
    Hash256 finish();

private:
    void* ctx_;
};

std::string to_hex(const std::uint8_t* data, std::size_t len);
std::string to_hex(std::string_view data);
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex);

}  // namespace consentchain

#endif
