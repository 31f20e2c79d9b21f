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

#include "consentchain/contracts.hpp"

#include <algorithm>
#include <map>

#include "consentchain/canonical.hpp"
#include "consentchain/consent.hpp"
#include "consentchain/legalprose.hpp"

namespace consentchain::contracts {

std::string_view contract_name(ContractName contract) {
    switch (contract) {
        case ContractName::Consent: return "Consent";
        case ContractName::Data: return "Data";
        case ContractName::Audit: return "Audit";
    }
    return "?";
}

std::optional<ContractName> contract_from_name(std::string_view name) {
    if (name == "Consent") return ContractName::Consent;
    if (name == "Data") return ContractName::Data;
    if (name == "Audit") return ContractName::Audit;
    return std::nullopt;
}

Result<std::pair<ContractName, std::string>> parse_action(std::string_view dotted) {
    std::size_t dot = dotted.find('.');
    if (dot == std::string_view::npos)
        return make_error(ErrorCode::UnknownAction, std::string(dotted));
    std::string_view head = dotted.substr(0, dot);
    std::string_view tail = dotted.substr(dot + 1);
    ContractName contract;
    if (head == "consent") {
        contract = ContractName::Consent;
    } else if (head == "data") {
        contract = ContractName::Data;
    } else if (head == "audit") {
        contract = ContractName::Audit;
    } else {
        return make_error(ErrorCode::UnknownContract, std::string(head));
    }
    if (tail.empty()) return make_error(ErrorCode::UnknownAction, std::string(dotted));
    return std::make_pair(contract, std::string(tail));
}

std::string canonical_proposal_bytes(const TxProposal& proposal) {
    std::string out;
    out += "proposal:" + proposal.proposal_id + "\n";
    out += "creator:" + proposal.creator + "\n";
    out += "contract:" + std::string(contract_name(proposal.contract)) + "\n";
    out += "action:" + proposal.action + "\n";
    // Count prefix keeps the encoding injective: zero args and one
    // empty arg would otherwise both render as "".
    out += "args:" + std::to_string(proposal.args.size()) + ":" +
           join_escaped(proposal.args) + "\n";
    out += "client_timestamp:" + std::to_string(proposal.client_timestamp) + "\n";
    return out;
}

Hash256 proposal_digest(const TxProposal& proposal) {
    return sha256(canonical_proposal_bytes(proposal));
}

std::string Version::str() const {
    return std::to_string(height) + "." + std::to_string(tx_index);
}

std::string canonical_rwset_bytes(const ReadWriteSet& rwset) {
    std::string out;
    for (const ReadEntry& read : rwset.reads) {
        out += "read:" + read.key + "@" + (read.version ? read.version->str() : std::string("-")) +
               "\n";
    }
    for (const WriteEntry& write : rwset.writes) {
        out += "write:" + write.key + "=" + to_hex(write.value) + "\n";
    }
    return out;
}

Hash256 rwset_digest(const ReadWriteSet& rwset) { return sha256(canonical_rwset_bytes(rwset)); }

std::string endorsement_message(const std::string& proposal_id, const Hash256& digest) {
    std::string message = proposal_id;
    message.append(reinterpret_cast<const char*>(digest.bytes.data()), digest.bytes.size());
    return message;
}

Endorsement endorse(const identity::Credential& endorser, const std::string& proposal_id,
                    const ReadWriteSet& rwset) {
    Endorsement out;
    out.endorser = endorser.actor_id;
    out.rwset_digest = rwset_digest(rwset);
    out.signature = identity::sign(endorser, endorsement_message(proposal_id, out.rwset_digest));
    return out;
}

std::string declaration_key(const Hash256& declaration_hash) {
    return "declaration/" + declaration_hash.hex();
}

std::string consent_key(const Hash256& subject_pseudonym, const Hash256& declaration_hash) {
    return "consent/" + subject_pseudonym.hex() + "/" + declaration_hash.hex();
}

std::string record_key(const Hash256& subject_pseudonym, const Hash256& payload_hash) {
    return "record/" + subject_pseudonym.hex() + "/" + payload_hash.hex();
}

std::string identity_key(std::string_view actor_ref) {
    return "identity/" + std::string(actor_ref);
}

std::string render_record_ref(const HealthRecordRef& ref) {
    std::string out;
    out += "payload:" + ref.payload_hash.hex() + "\n";
    out += "subject:" + ref.subject_pseudonym.hex() + "\n";
    out += "declaration:" + ref.declaration_hash.hex() + "\n";
    out += "submitted_by:" + ref.submitted_by + "\n";
    out += "supersedes:" + (ref.supersedes ? ref.supersedes->hex() : std::string("-")) + "\n";
    return out;
}

Result<HealthRecordRef> parse_record_ref(std::string_view bytes) {
    static const std::vector<std::string> keys = {"payload", "subject", "declaration",
                                                  "submitted_by", "supersedes"};
    auto doc = KvDocument::parse(bytes, keys, keys);
    if (!doc) return doc.error();
    HealthRecordRef ref;
    auto payload = Hash256::from_hex(doc.value().get("payload"));
    auto subject = Hash256::from_hex(doc.value().get("subject"));
    auto declaration = Hash256::from_hex(doc.value().get("declaration"));
    if (!payload || !subject || !declaration)
        return make_error(ErrorCode::BadParams, "record ref hashes");
    ref.payload_hash = *payload;
    ref.subject_pseudonym = *subject;
    ref.declaration_hash = *declaration;
    ref.submitted_by = doc.value().get("submitted_by");
    const std::string& supersedes = doc.value().get("supersedes");
    if (supersedes != "-") {
        auto old_hash = Hash256::from_hex(supersedes);
        if (!old_hash) return make_error(ErrorCode::BadParams, "supersedes hash");
        ref.supersedes = *old_hash;
    }
    return ref;
}

namespace {

/// Read/write recorder around the snapshot. Reads always observe the
/// committed snapshot (never pending writes); each key's version is
/// recorded once.
class TxSimulator {
public:
    explicit TxSimulator(const StateView& snapshot) : snapshot_(snapshot) {}

    std::optional<std::string> read(const std::string& key) {
        auto got = snapshot_.get(key);
        std::optional<Version> version;
        if (got) version = got->second;
        reads_.emplace(key, version);
        if (!got) return std::nullopt;
        return got->first;
    }

    void write(const std::string& key, std::string value) {
        writes_[key] = std::move(value);
    }

    ReadWriteSet take() {
        ReadWriteSet out;
        out.reads.reserve(reads_.size());
        for (auto& [key, version] : reads_) out.reads.push_back(ReadEntry{key, version});
        out.writes.reserve(writes_.size());
        for (auto& [key, value] : writes_)
            out.writes.push_back(WriteEntry{key, std::move(value)});
        return out;
    }

private:
    const StateView& snapshot_;
    std::map<std::string, std::optional<Version>> reads_;
    std::map<std::string, std::string> writes_;
};

struct ResolvedActor {
    const identity::Actor* actor;
    std::string ref;
};

Result<ResolvedActor> resolve_ref(const ContractContext& context, std::string_view ref) {
    auto actor_id = context.pseudonyms.resolve(ref);
    if (!actor_id) return make_error(ErrorCode::UnknownActor, std::string(ref));
    const identity::Actor* actor = context.registry.find(*actor_id);
    if (actor == nullptr) return make_error(ErrorCode::UnknownActor, std::string(ref));
    return ResolvedActor{actor, std::string(ref)};
}

Result<Hash256> parse_hash_arg(const std::string& arg, const char* what) {
    auto hash = Hash256::from_hex(arg);
    if (!hash) return make_error(ErrorCode::BadParams, std::string(what) + ": " + arg);
    return *hash;
}

struct ConsentTarget {
    Hash256 declaration_hash;
    Hash256 subject_pseudonym;
    std::string subject_ref;
    consent::ConsentRecord record;
    std::string key;
};

/// Shared front half of the consent actions: resolve the subject and
/// load (or initialize) the record. A request additionally requires the
/// declaration to be on-chain (the informed purpose travels with the
/// request), while respond/revoke only touch the consent key, so the
/// state machine answers for an unpublished declaration too.
Result<ConsentTarget> load_consent_target(TxSimulator& sim, const ContractContext& context,
                                          const std::string& subject_arg,
                                          const std::string& decl_arg,
                                          bool require_declaration) {
    auto declaration_hash = parse_hash_arg(decl_arg, "declaration hash");
    if (!declaration_hash) return declaration_hash.error();

    auto subject = resolve_ref(context, subject_arg);
    if (!subject) return subject.error();
    if (!subject.value().actor->has_role(identity::Role::DataSubject))
        return make_error(ErrorCode::RoleDenied,
                          "consent target must hold DataSubject: " + subject_arg);

    if (require_declaration && !sim.read(declaration_key(declaration_hash.value())))
        return make_error(ErrorCode::UnknownKey,
                          "declaration not published: " + decl_arg);

    ConsentTarget target;
    target.declaration_hash = declaration_hash.value();
    target.subject_pseudonym =
        identity::pseudonym(context.network_salt, subject.value().actor->actor_id);
    target.subject_ref = "~" + target.subject_pseudonym.hex();
    target.key = consent_key(target.subject_pseudonym, target.declaration_hash);

    auto stored = sim.read(target.key);
    if (stored) {
        auto parsed = consent::parse_record(*stored);
        if (!parsed) return parsed.error();
        target.record = parsed.value();
    } else {
        target.record =
            consent::ConsentRecord::initial(target.subject_ref, target.declaration_hash);
    }
    return target;
}

Result<ReadWriteSet> run_consent_contract(const TxProposal& proposal, TxSimulator& sim,
                                          const ContractContext& context) {
    auto creator = resolve_ref(context, proposal.creator);
    if (!creator) return creator.error();

    if (proposal.action == "request") {
        if (proposal.args.size() != 2)
            return make_error(ErrorCode::BadParams, "consent.request wants 2 args");
        auto target = load_consent_target(sim, context, proposal.args[0], proposal.args[1],
                                          /*require_declaration=*/true);
        if (!target) return target.error();
        auto next = consent::request_consent(target.value().record, context.registry,
                                             creator.value().actor->actor_id,
                                             proposal.client_timestamp);
        if (!next) return next.error();
        sim.write(target.value().key, consent::render_canonical(next.value()));
        return sim.take();
    }

    if (proposal.action == "respond") {
        if (proposal.args.size() != 3)
            return make_error(ErrorCode::BadParams, "consent.respond wants 3 args");
        auto target = load_consent_target(sim, context, proposal.args[0], proposal.args[1],
                                          /*require_declaration=*/false);
        if (!target) return target.error();
        consent::Decision decision;
        if (proposal.args[2] == "grant") {
            decision = consent::Decision::Grant;
        } else if (proposal.args[2] == "deny") {
            decision = consent::Decision::Deny;
        } else {
            return make_error(ErrorCode::BadParams, "decision: " + proposal.args[2]);
        }
        auto next = consent::respond_consent(target.value().record, proposal.creator, decision,
                                             proposal.client_timestamp);
        if (!next) return next.error();
        sim.write(target.value().key, consent::render_canonical(next.value()));
        return sim.take();
    }

    if (proposal.action == "revoke") {
        if (proposal.args.size() != 2)
            return make_error(ErrorCode::BadParams, "consent.revoke wants 2 args");
        auto target = load_consent_target(sim, context, proposal.args[0], proposal.args[1],
                                          /*require_declaration=*/false);
        if (!target) return target.error();
        auto next = consent::revoke_consent(target.value().record, proposal.creator,
                                            proposal.client_timestamp);
        if (!next) return next.error();
        sim.write(target.value().key, consent::render_canonical(next.value()));
        return sim.take();
    }

    if (proposal.action == "publish_declaration") {
        if (proposal.args.size() != 1)
            return make_error(ErrorCode::BadParams, "consent.publish_declaration wants 1 arg");
        auto declaration = prose::parse_declaration(proposal.args[0]);
        if (!declaration) return declaration.error();
        if (!creator.value().actor->has_role(identity::Role::DataController) ||
            creator.value().actor->actor_id != declaration.value().controller) {
            return make_error(ErrorCode::NotAController,
                              "declaration controller is " + declaration.value().controller);
        }
        std::string canonical = prose::render_canonical(declaration.value());
        Hash256 hash = sha256(canonical);
        std::string key = declaration_key(hash);
        if (sim.read(key)) return make_error(ErrorCode::DuplicateKey, key);
        sim.write(key, std::move(canonical));
        return sim.take();
    }

    if (proposal.action == "register_actor") {
        // Admin audit mirror: membership itself lives off-chain, this
        // records role assignment as an identity-namespace write.
        if (proposal.args.size() != 4)
            return make_error(ErrorCode::BadParams, "consent.register_actor wants 4 args");
        if (!creator.value().actor->has_role(identity::Role::DataController))
            return make_error(ErrorCode::RoleDenied, proposal.creator);
        const std::string& ref = proposal.args[0];
        bool ref_ok = identity::is_pseudonym_ref(ref)
                          ? Hash256::from_hex(std::string_view(ref).substr(1)).has_value()
                          : is_valid_actor_id(ref);
        if (!ref_ok) return make_error(ErrorCode::BadActorId, ref);
        if (proposal.args[1] != "-" && !is_valid_actor_id(proposal.args[1]))
            return make_error(ErrorCode::BadActorId, proposal.args[1]);
        auto roles = identity::roles_from_csv(proposal.args[2]);
        if (!roles) return roles.error();
        auto tag = parse_hash_arg(proposal.args[3], "public tag");
        if (!tag) return tag.error();
        std::string key = identity_key(ref);
        if (sim.read(key)) return make_error(ErrorCode::DuplicateActor, ref);
        std::string value = "actor:" + ref + "\n";
        value += "org:" + proposal.args[1] + "\n";
        value += "roles:" + identity::roles_to_csv(roles.value()) + "\n";
        value += "tag:" + tag.value().hex() + "\n";
        value += "active:1\n";
        sim.write(key, std::move(value));
        return sim.take();
    }

    return make_error(ErrorCode::UnknownAction, "consent." + proposal.action);
}

Result<ReadWriteSet> run_data_contract(const TxProposal& proposal, TxSimulator& sim,
                                       const ContractContext& context) {
    if (proposal.action != "submit")
        return make_error(ErrorCode::UnknownAction, "data." + proposal.action);
    if (proposal.args.size() != 5)
        return make_error(ErrorCode::BadParams, "data.submit wants 5 args");

    // Check order is fixed: role, consent, minimization.
    auto creator = resolve_ref(context, proposal.creator);
    if (!creator) return creator.error();
    if (!creator.value().actor->has_role(identity::Role::DataController) &&
        !creator.value().actor->has_role(identity::Role::DataProcessor))
        return make_error(ErrorCode::RoleDenied, proposal.creator);

    auto payload_hash = parse_hash_arg(proposal.args[2], "payload hash");
    if (!payload_hash) return payload_hash.error();

    auto subject = resolve_ref(context, proposal.args[0]);
    if (!subject) return subject.error();
    if (!subject.value().actor->has_role(identity::Role::DataSubject))
        return make_error(ErrorCode::RoleDenied,
                          "record subject must hold DataSubject: " + proposal.args[0]);

    auto declaration_hash = parse_hash_arg(proposal.args[1], "declaration hash");
    if (!declaration_hash) return declaration_hash.error();
    auto declaration_bytes = sim.read(declaration_key(declaration_hash.value()));
    if (!declaration_bytes)
        return make_error(ErrorCode::UnknownKey,
                          "declaration not published: " + proposal.args[1]);
    auto declaration = prose::parse_declaration(*declaration_bytes);
    if (!declaration) return declaration.error();

    Hash256 subject_pseudonym =
        identity::pseudonym(context.network_salt, subject.value().actor->actor_id);
    auto consent_bytes = sim.read(consent_key(subject_pseudonym, declaration_hash.value()));
    if (!consent_bytes)
        return make_error(ErrorCode::ConsentRequired, "no consent record for declaration");
    auto record = consent::parse_record(*consent_bytes);
    if (!record) return record.error();
    if (!consent::is_access_permitted(record.value(), declaration_hash.value(),
                                      proposal.client_timestamp))
        return make_error(ErrorCode::ConsentRequired,
                          std::string(consent::state_name(consent::consent_status_at(
                              record.value(), proposal.client_timestamp))));

    std::vector<std::string> fields = split_csv(proposal.args[3]);
    for (const auto& field : fields) {
        if (!is_valid_field_name(field)) return make_error(ErrorCode::BadFieldName, field);
    }
    if (context.payloads != nullptr) {
        auto actual = context.payloads->fields_of(payload_hash.value());
        if (!actual)
            return make_error(ErrorCode::UnknownKey,
                              "payload not in store: " + proposal.args[2]);
        std::set<std::string> claimed(fields.begin(), fields.end());
        std::set<std::string> stored(actual->begin(), actual->end());
        if (claimed != stored)
            return make_error(ErrorCode::MinimizationViolation,
                              "declared fields differ from stored payload");
        fields = *actual;
    }
    auto violations = prose::check_field_subset(declaration.value(), fields);
    if (!violations.empty())
        return make_error(ErrorCode::MinimizationViolation, join_csv(violations));

    std::string supersedes = "-";
    if (proposal.args[4] != "-") {
        auto old_hash = parse_hash_arg(proposal.args[4], "supersedes hash");
        if (!old_hash) return old_hash.error();
        if (!sim.read(record_key(subject_pseudonym, old_hash.value())))
            return make_error(ErrorCode::UnknownKey,
                              "superseded record not found: " + proposal.args[4]);
        supersedes = old_hash.value().hex();
    }

    std::string key = record_key(subject_pseudonym, payload_hash.value());
    if (sim.read(key)) return make_error(ErrorCode::DuplicateKey, key);

    HealthRecordRef ref;
    ref.payload_hash = payload_hash.value();
    ref.subject_pseudonym = subject_pseudonym;
    ref.declaration_hash = declaration_hash.value();
    ref.submitted_by = proposal.creator;
    if (supersedes != "-") ref.supersedes = Hash256::from_hex(supersedes);
    sim.write(key, render_record_ref(ref));
    return sim.take();
}

Result<ReadWriteSet> run_audit_contract(const TxProposal& proposal, TxSimulator& sim,
                                        const ContractContext& context) {
    if (proposal.action != "history")
        return make_error(ErrorCode::UnknownAction, "audit." + proposal.action);
    if (proposal.args.size() != 1)
        return make_error(ErrorCode::BadParams, "audit.history wants 1 arg");
    auto creator = resolve_ref(context, proposal.creator);
    if (!creator) return creator.error();
    const std::string& key = proposal.args[0];
    if (!is_valid_state_key(key)) return make_error(ErrorCode::BadParams, key);
    // Read-only: the committed transaction is the audit trail of who
    // asked about this key; the answer itself flows off-chain.
    if (!sim.read(key)) return make_error(ErrorCode::UnknownKey, key);
    return sim.take();
}

}  // namespace

Result<ReadWriteSet> simulate_proposal(const TxProposal& proposal, const StateView& snapshot,
                                       const ContractContext& context) {
    TxSimulator sim(snapshot);
    switch (proposal.contract) {
        case ContractName::Consent: return run_consent_contract(proposal, sim, context);
        case ContractName::Data: return run_data_contract(proposal, sim, context);
        case ContractName::Audit: return run_audit_contract(proposal, sim, context);
    }
    return make_error(ErrorCode::UnknownContract, "contract enum out of range");
}

bool check_endorsement_policy(const EndorsementPolicy& policy,
                              const std::vector<Endorsement>& endorsements,
                              const std::string& proposal_id, const ReadWriteSet& rwset,
                              const identity::Registry& registry) {
    const Hash256 expected = rwset_digest(rwset);
    std::set<std::string> distinct;
    for (const Endorsement& endorsement : endorsements) {
        if (policy.endorser_set.count(endorsement.endorser) == 0) continue;
        if (endorsement.rwset_digest != expected) continue;
        auto verified = registry.verify(
            endorsement.endorser, endorsement_message(proposal_id, endorsement.rwset_digest),
            endorsement.signature);
        if (!verified || !verified.value()) continue;
        distinct.insert(endorsement.endorser);
    }
    return static_cast<int>(distinct.size()) >= policy.k;
}

}  // namespace consentchain::contracts
