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

#include "consentchain/consent.hpp"

#include <algorithm>

#include "consentchain/canonical.hpp"

namespace consentchain::consent {

namespace {

bool timestamp_ok(const ConsentRecord& record, std::int64_t now) {
    return record.history.empty() || now >= record.history.back().timestamp;
}

ConsentRecord appended(const ConsentRecord& record, ConsentState state, std::int64_t now,
                       std::string acting_actor) {
    ConsentRecord next = record;
    next.state = state;
    next.history.push_back(HistoryEntry{state, now, std::move(acting_actor)});
    if (state == ConsentState::Granted) next.granted_at = now;
    if (state == ConsentState::Revoked) next.revoked_at = now;
    return next;
}

}  // namespace

std::string_view state_name(ConsentState state) {
    switch (state) {
        case ConsentState::NotRequested: return "NotRequested";
        case ConsentState::Requested: return "Requested";
        case ConsentState::Granted: return "Granted";
        case ConsentState::Denied: return "Denied";
        case ConsentState::Revoked: return "Revoked";
    }
    return "?";
}

std::optional<ConsentState> state_from_name(std::string_view name) {
    if (name == "NotRequested") return ConsentState::NotRequested;
    if (name == "Requested") return ConsentState::Requested;
    if (name == "Granted") return ConsentState::Granted;
    if (name == "Denied") return ConsentState::Denied;
    if (name == "Revoked") return ConsentState::Revoked;
    return std::nullopt;
}

ConsentRecord ConsentRecord::initial(std::string subject_ref, const Hash256& declaration_hash) {
    ConsentRecord record;
    record.subject = std::move(subject_ref);
    record.declaration_hash = declaration_hash;
    return record;
}

Result<ConsentRecord> request_consent(const ConsentRecord& record,
                                      const identity::Registry& registry,
                                      const std::string& controller_id, std::int64_t now) {
    const identity::Actor* controller = registry.find(controller_id);
    if (controller == nullptr) return make_error(ErrorCode::UnknownActor, controller_id);
    if (!controller->has_role(identity::Role::DataController))
        return make_error(ErrorCode::NotAController, controller_id);
    if (record.state != ConsentState::NotRequested && record.state != ConsentState::Denied &&
        record.state != ConsentState::Revoked) {
        return make_error(ErrorCode::IllegalTransition,
                          std::string("request while ") + std::string(state_name(record.state)));
    }
    if (!timestamp_ok(record, now))
        return make_error(ErrorCode::IllegalTransition, "timestamp precedes history");
    return appended(record, ConsentState::Requested, now, controller_id);
}

Result<ConsentRecord> respond_consent(const ConsentRecord& record,
                                      const std::string& subject_ref, Decision decision,
                                      std::int64_t now) {
    if (subject_ref != record.subject) return make_error(ErrorCode::NotTheSubject, subject_ref);
    if (record.state != ConsentState::Requested) {
        return make_error(ErrorCode::IllegalTransition,
                          std::string("respond while ") + std::string(state_name(record.state)));
    }
    if (!timestamp_ok(record, now))
        return make_error(ErrorCode::IllegalTransition, "timestamp precedes history");
    ConsentState target =
        decision == Decision::Grant ? ConsentState::Granted : ConsentState::Denied;
    return appended(record, target, now, subject_ref);
}

Result<ConsentRecord> revoke_consent(const ConsentRecord& record, const std::string& subject_ref,
                                     std::int64_t now) {
    if (subject_ref != record.subject) return make_error(ErrorCode::NotTheSubject, subject_ref);
    if (record.state != ConsentState::Granted) {
        return make_error(ErrorCode::IllegalTransition,
                          std::string("revoke while ") + std::string(state_name(record.state)));
    }
    if (!timestamp_ok(record, now))
        return make_error(ErrorCode::IllegalTransition, "timestamp precedes history");
    return appended(record, ConsentState::Revoked, now, subject_ref);
}

ConsentState consent_status_at(const ConsentRecord& record, std::int64_t t) {
    ConsentState state = ConsentState::NotRequested;
    for (const HistoryEntry& entry : record.history) {
        if (entry.timestamp > t) break;
        state = entry.state;
    }
    return state;
}

bool is_access_permitted(const ConsentRecord& record, const Hash256& declaration_hash,
                         std::int64_t t) {
    return record.declaration_hash == declaration_hash &&
           consent_status_at(record, t) == ConsentState::Granted;
}

Result<ConsentRecord> replay_history(std::string subject_ref, const Hash256& declaration_hash,
                                     const std::vector<HistoryEntry>& history) {
    ConsentRecord record = ConsentRecord::initial(std::move(subject_ref), declaration_hash);
    for (const HistoryEntry& entry : history) {
        if (!timestamp_ok(record, entry.timestamp))
            return make_error(ErrorCode::IllegalTransition, "history timestamps not monotonic");
        bool legal = false;
        switch (entry.state) {
            case ConsentState::Requested:
                legal = record.state == ConsentState::NotRequested ||
                        record.state == ConsentState::Denied ||
                        record.state == ConsentState::Revoked;
                break;
            case ConsentState::Granted:
            case ConsentState::Denied:
                legal = record.state == ConsentState::Requested;
                break;
            case ConsentState::Revoked:
                legal = record.state == ConsentState::Granted;
                break;
            case ConsentState::NotRequested:
                legal = false;
                break;
        }
        if (!legal) {
            return make_error(ErrorCode::IllegalTransition,
                              std::string(state_name(record.state)) + " -> " +
                                  std::string(state_name(entry.state)));
        }
        record = appended(record, entry.state, entry.timestamp, entry.acting_actor);
    }
    return record;
}

std::string render_canonical(const ConsentRecord& record) {
    std::string out;
    out += "subject:" + record.subject + "\n";
    out += "declaration:" + record.declaration_hash.hex() + "\n";
    out += "state:" + std::string(state_name(record.state)) + "\n";
    out += "granted_at:" +
           (record.granted_at ? std::to_string(*record.granted_at) : std::string("-")) + "\n";
    out += "revoked_at:" +
           (record.revoked_at ? std::to_string(*record.revoked_at) : std::string("-")) + "\n";
    std::string entries;
    for (std::size_t i = 0; i < record.history.size(); ++i) {
        if (i > 0) entries.push_back(',');
        const HistoryEntry& entry = record.history[i];
        entries += std::string(state_name(entry.state)) + "@" + std::to_string(entry.timestamp) +
                   "@" + entry.acting_actor;
    }
    out += "history:" + entries + "\n";
    return out;
}

Result<ConsentRecord> parse_record(std::string_view bytes) {
    static const std::vector<std::string> keys = {"subject",    "declaration", "state",
                                                  "granted_at", "revoked_at",  "history"};
    static const std::vector<std::string> required = {"subject", "declaration", "state"};
    auto doc = KvDocument::parse(bytes, keys, required);
    if (!doc) return doc.error();

    auto declaration = Hash256::from_hex(doc.value().get("declaration"));
    if (!declaration) return make_error(ErrorCode::BadParams, "declaration hash");

    std::vector<HistoryEntry> history;
    const std::string& joined = doc.value().get("history");
    if (!joined.empty()) {
        for (const auto& token : split_csv(joined)) {
            std::size_t first = token.find('@');
            std::size_t second = first == std::string::npos ? std::string::npos
                                                            : token.find('@', first + 1);
            if (first == std::string::npos || second == std::string::npos)
                return make_error(ErrorCode::BadParams, "history entry: " + token);
            auto state = state_from_name(token.substr(0, first));
            auto timestamp = parse_int64(token.substr(first + 1, second - first - 1));
            std::string actor = token.substr(second + 1);
            if (!state || !timestamp || actor.empty())
                return make_error(ErrorCode::BadParams, "history entry: " + token);
            history.push_back(HistoryEntry{*state, *timestamp, std::move(actor)});
        }
    }

    auto replayed = replay_history(doc.value().get("subject"), *declaration, history);
    if (!replayed) return replayed.error();
    const ConsentRecord& record = replayed.value();

    // Stored summary fields must agree with the replay.
    if (std::string(state_name(record.state)) != doc.value().get("state"))
        return make_error(ErrorCode::BadParams, "state does not match history");
    auto check_stamp = [&](const char* key,
                           const std::optional<std::int64_t>& actual) -> bool {
        const std::string& text = doc.value().get(key);
        if (text.empty() || text == "-") return !actual.has_value();
        auto parsed = parse_int64(text);
        return parsed && actual && *parsed == *actual;
    };
    if (!check_stamp("granted_at", record.granted_at) ||
        !check_stamp("revoked_at", record.revoked_at))
        return make_error(ErrorCode::BadParams, "timestamps do not match history");
    return replayed;
}

}  // namespace consentchain::consent
