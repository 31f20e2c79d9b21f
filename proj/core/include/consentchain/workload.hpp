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

#ifndef CONSENTCHAIN_WORKLOAD_HPP
#define CONSENTCHAIN_WORKLOAD_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "consentchain/errors.hpp"

namespace consentchain::workload {

/// One scripted action. Line format: `tick|actor|command|arg|arg...`.
/// Commands and their args after normalization:
///   publish            [declaration_text]
///   consent.request    [subject_id, decl_hash_hex]
///   consent.respond    [decl_hash_hex, grant|deny]       (actor answers for itself)
///                      [subject_id, decl_hash_hex, grant|deny]
///   consent.revoke     [decl_hash_hex] or [subject_id, decl_hash_hex]
///   data.submit        [subject_id, decl_hash_hex, field=value;..., supersedes_hex?]
///   audit.history      [state_key]
///   register_actor     [actor_id]                        (audit mirror of a registry entry)
/// Any other dotted `contract.action` command drives that contract with
/// the args passed through verbatim. In workload files a declaration may
/// be referenced as `@<path>`; the parser inlines the file (publish) or
/// replaces the ref with the declaration hash (everything else).
struct Event {
    std::int64_t tick = 0;
    std::string actor;
    std::string command;
    std::vector<std::string> args;
};

struct Workload {
    std::vector<Event> events;
};

/// Parses a workload file. `load_file` maps an `@` reference path to
/// file contents (relative to the workload file's directory).
Result<Workload> parse_workload(
    std::string_view text,
    const std::function<Result<std::string>(const std::string&)>& load_file);

}  // namespace consentchain::workload

#endif
