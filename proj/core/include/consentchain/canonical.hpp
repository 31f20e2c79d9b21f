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

#ifndef CONSENTCHAIN_CANONICAL_HPP
#define CONSENTCHAIN_CANONICAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consentchain/errors.hpp"

namespace consentchain {

// Everything that gets hashed goes through the helpers in this header.
// The rules are deliberately rigid: fixed key order, `key:value\n` lines,
// lists comma-joined with no spaces, and backslash escapes wherever a
// value may contain the separator characters. Canonical bytes must be a
// fixed point of parse∘render, and distinct documents must produce
// distinct bytes.

/// Escape backslash, comma and newline so arbitrary strings survive
/// comma-joined list encoding: `\` -> `\\`, `,` -> `\,`, newline -> `\n`.
std::string escape_value(std::string_view raw);
std::optional<std::string> unescape_value(std::string_view escaped);

std::string join_escaped(const std::vector<std::string>& items);
std::optional<std::vector<std::string>> split_escaped(std::string_view joined);

/// Plain CSV for charset-restricted tokens (ids, field names, hex).
std::vector<std::string> split_csv(std::string_view text);
std::string join_csv(const std::vector<std::string>& items);

std::string trim(std::string_view text);
std::optional<std::int64_t> parse_int64(std::string_view text);

/// Registry ids: [A-Za-z0-9_.-]+, which keeps every canonical separator
/// ('|', ',', '@', ':', '~', '/') out of identifier space.
bool is_valid_actor_id(std::string_view id);
/// Declaration/payload field names: [a-z0-9_]+.
bool is_valid_field_name(std::string_view name);
/// World-state keys: '/'-separated segments of [A-Za-z0-9_.~-]+.
bool is_valid_state_key(std::string_view key);

/// Line-oriented `key: value` document (purpose declarations, network
/// config). Blank lines and `#` comments are skipped. Split happens at
/// the first ':'; key and value are trimmed.
class KvDocument {
public:
    /// Parses and validates against the allowed key set. Reports
    /// UnknownKey for keys outside `allowed`, DuplicateKey on repeats,
    /// and MissingKey for any `required` key not present.
    static Result<KvDocument> parse(std::string_view text,
                                    const std::vector<std::string>& allowed,
                                    const std::vector<std::string>& required);

    bool has(const std::string& key) const;
    /// Value for `key`; empty string when absent.
    const std::string& get(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
    static const std::string kEmpty;
};

}  // namespace consentchain

#endif
