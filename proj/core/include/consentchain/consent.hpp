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

#ifndef CONSENTCHAIN_CONSENT_HPP
#define CONSENTCHAIN_CONSENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"
#include "consentchain/identity.hpp"

namespace consentchain::consent {

/// The consent lifecycle. Legal transitions only:
///   NotRequested -> Requested
///   Requested    -> Granted | Denied
///   Granted      -> Revoked
///   Denied       -> Requested
///   Revoked      -> Requested
/// There is no path into Granted that skips an explicit Requested, and
/// no timeout-based transition exists: silence and inactivity leave the
/// record exactly as it was.
enum class ConsentState { NotRequested, Requested, Granted, Denied, Revoked };

std::string_view state_name(ConsentState state);
std::optional<ConsentState> state_from_name(std::string_view name);

struct HistoryEntry {
    ConsentState state;
    std::int64_t timestamp;
    std::string acting_actor;  // on-chain ref: raw id or ~pseudonym

    bool operator==(const HistoryEntry&) const = default;
};

/// Per (subject, declaration) consent record. The subject is the
/// on-chain subject reference (pseudonym hex for citizens); the record
/// never stores a raw data-subject id.
struct ConsentRecord {
    std::string subject;
    Hash256 declaration_hash;
    ConsentState state = ConsentState::NotRequested;
    std::vector<HistoryEntry> history;
    std::optional<std::int64_t> granted_at;
    std::optional<std::int64_t> revoked_at;

    bool operator==(const ConsentRecord&) const = default;

    static ConsentRecord initial(std::string subject_ref, const Hash256& declaration_hash);
};

enum class Decision { Grant, Deny };

/// Controller asks for consent (the request carries the declaration, so
/// the subject is informed before any grant can exist). Allowed from
/// NotRequested, Denied and Revoked.
Result<ConsentRecord> request_consent(const ConsentRecord& record,
                                      const identity::Registry& registry,
                                      const std::string& controller_id, std::int64_t now);

/// Subject answers a pending request. Grant sets granted_at.
Result<ConsentRecord> respond_consent(const ConsentRecord& record,
                                      const std::string& subject_ref, Decision decision,
                                      std::int64_t now);

/// Subject withdraws a grant: one call, no counterparty approval, and
/// the revocation timestamp is recorded.
Result<ConsentRecord> revoke_consent(const ConsentRecord& record, const std::string& subject_ref,
                                     std::int64_t now);

/// State as of time t: the last history entry with timestamp <= t
/// (boundary inclusive); NotRequested when there is none.
ConsentState consent_status_at(const ConsentRecord& record, std::int64_t t);

/// True iff the record is bound to exactly this declaration hash and
/// consent stands Granted at t.
bool is_access_permitted(const ConsentRecord& record, const Hash256& declaration_hash,
                         std::int64_t t);

/// Rebuilds a record from its event history; rejects histories that are
/// not reachable through the state machine.
Result<ConsentRecord> replay_history(std::string subject_ref, const Hash256& declaration_hash,
                                     const std::vector<HistoryEntry>& history);

/// Canonical world-state value bytes (key:value lines, fixed order);
/// parse validates by replaying the embedded history.
std::string render_canonical(const ConsentRecord& record);
Result<ConsentRecord> parse_record(std::string_view bytes);

}  // namespace consentchain::consent

#endif
