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

#ifndef CONSENTCHAIN_LEGALPROSE_HPP
#define CONSENTCHAIN_LEGALPROSE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"

namespace consentchain::prose {

/// A machine-checkable purpose declaration: who controls processing,
/// for what declared purpose, over which fields, for how long. The
/// content-addressed hash of the canonical form is the identity other
/// modules bind consent and records to. Changing the purpose means a
/// new declaration, a new hash, and fresh consent.
struct PurposeDeclaration {
    std::string declaration_id;
    std::string controller;
    std::vector<std::string> processors;      // declared order
    std::string purpose_text;
    std::vector<std::string> allowed_fields;  // sorted, unique, [a-z0-9_]+
    std::int64_t retention_days = 0;
    std::string scenario;

    bool allows_field(std::string_view field) const;
};

/// Parses the `*.lprose` format: line-oriented `key: value` with keys
/// {id, controller, processors, purpose, fields, retention_days,
/// scenario}, order-insensitive, unknown and duplicate keys rejected.
Result<PurposeDeclaration> parse_declaration(std::string_view text);

/// Canonical bytes: fixed key order (id, controller, processors,
/// purpose, fields, retention_days, scenario), each line `key:value\n`,
/// lists comma-joined with no spaces, fields sorted lexicographically.
std::string render_canonical(const PurposeDeclaration& declaration);

/// SHA-256 over the canonical bytes.
Hash256 hash_declaration(const PurposeDeclaration& declaration);

/// Data-minimization check: returns the submitted field names that are
/// not allowed by the declaration (sorted, unique); empty means ok.
std::vector<std::string> check_field_subset(const PurposeDeclaration& declaration,
                                            const std::vector<std::string>& submitted_fields);

}  // namespace consentchain::prose

#endif
