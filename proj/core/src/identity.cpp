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

#include "consentchain/identity.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "consentchain/canonical.hpp"

namespace consentchain::identity {

std::string_view role_name(Role role) {
    switch (role) {
        case Role::DataSubject: return "DataSubject";
        case Role::DataController: return "DataController";
        case Role::DataProcessor: return "DataProcessor";
        case Role::Orderer: return "Orderer";
        case Role::Auditor: return "Auditor";
    }
    return "?";
}

std::optional<Role> role_from_name(std::string_view name) {
    if (name == "DataSubject") return Role::DataSubject;
    if (name == "DataController") return Role::DataController;
    if (name == "DataProcessor") return Role::DataProcessor;
    if (name == "Orderer") return Role::Orderer;
    if (name == "Auditor") return Role::Auditor;
    return std::nullopt;
}

std::string roles_to_csv(const RoleSet& roles) {
    std::vector<std::string> names;
    names.reserve(roles.size());
    for (Role role : roles) names.emplace_back(role_name(role));
    return join_csv(names);
}

Result<RoleSet> roles_from_csv(std::string_view csv) {
    RoleSet out;
    for (const auto& token : split_csv(csv)) {
        auto role = role_from_name(token);
        if (!role) return make_error(ErrorCode::BadConfig, "unknown role: " + token);
        out.insert(*role);
    }
    return out;
}

Hash256 SeededHashScheme::sign(const Credential& credential, std::string_view message) const {
    Sha256 hasher;
    hasher.update(credential.seed.data(), credential.seed.size());
    hasher.update(message);
    return hasher.finish();
}

bool SeededHashScheme::verify(const Credential& credential, std::string_view message,
                              const Hash256& signature) const {
    return sign(credential, message) == signature;
}

const SignatureScheme& default_scheme() {
    static const SeededHashScheme scheme;
    return scheme;
}

Hash256 sign(const Credential& credential, std::string_view message) {
    return default_scheme().sign(credential, message);
}

Result<Actor> Registry::register_actor(const std::string& actor_id,
                                       const std::optional<std::string>& org_id,
                                       const RoleSet& roles, const Seed& seed) {
    if (!is_valid_actor_id(actor_id)) return make_error(ErrorCode::BadActorId, actor_id);
    if (org_id && !is_valid_actor_id(*org_id)) return make_error(ErrorCode::BadActorId, *org_id);
    if (index_.count(actor_id) != 0) return make_error(ErrorCode::DuplicateActor, actor_id);

    if (roles.empty() && org_id)
        return make_error(ErrorCode::RoleOrgMismatch, "organization with parent org");
    if (roles.count(Role::DataSubject) != 0 && org_id)
        return make_error(ErrorCode::RoleOrgMismatch, "DataSubject with org_id");

    bool needs_org =
        roles.count(Role::DataController) != 0 || roles.count(Role::DataProcessor) != 0;
    if (needs_org) {
        if (!org_id) return make_error(ErrorCode::UnknownOrganization, "org_id required");
        const Actor* org = find(*org_id);
        if (org == nullptr || !org->is_organization())
            return make_error(ErrorCode::UnknownOrganization, *org_id);
    } else if (org_id) {
        const Actor* org = find(*org_id);
        if (org == nullptr || !org->is_organization())
            return make_error(ErrorCode::UnknownOrganization, *org_id);
    }

    Actor actor;
    actor.actor_id = actor_id;
    actor.org_id = org_id;
    actor.roles = roles;
    actor.public_tag = sha256(seed.data(), seed.size());
    actor.active = true;

    index_.emplace(actor_id, actors_.size());
    actors_.push_back(actor);
    credentials_.emplace(actor_id, Credential{actor_id, seed});
    return actor;
}

Result<Actor> Registry::register_organization(const std::string& org_id, const Seed& seed) {
    return register_actor(org_id, std::nullopt, RoleSet{}, seed);
}

const Actor* Registry::find(std::string_view actor_id) const {
    auto it = index_.find(actor_id);
    return it == index_.end() ? nullptr : &actors_[it->second];
}

Status Registry::deactivate(std::string_view actor_id) {
    auto it = index_.find(actor_id);
    if (it == index_.end()) return make_error(ErrorCode::UnknownActor, std::string(actor_id));
    actors_[it->second].active = false;
    return ok_status();
}

const Credential* Registry::credential(std::string_view actor_id) const {
    auto it = credentials_.find(actor_id);
    return it == credentials_.end() ? nullptr : &it->second;
}

Result<Hash256> Registry::sign_as(std::string_view actor_id, std::string_view message) const {
    const Credential* cred = credential(actor_id);
    if (cred == nullptr) return make_error(ErrorCode::UnknownActor, std::string(actor_id));
    return scheme().sign(*cred, message);
}

Result<bool> Registry::verify(std::string_view actor_id, std::string_view message,
                              const Hash256& signature) const {
    const Credential* cred = credential(actor_id);
    if (cred == nullptr) return make_error(ErrorCode::UnknownActor, std::string(actor_id));
    return scheme().verify(*cred, message, signature);
}

void Registry::set_scheme(std::shared_ptr<const SignatureScheme> scheme) {
    scheme_ = std::move(scheme);
}

const SignatureScheme& Registry::scheme() const {
    return scheme_ ? *scheme_ : default_scheme();
}

Result<Registry> Registry::parse(std::string_view text) {
    Registry registry;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = trim(eol == std::string_view::npos ? text.substr(pos)
                                                              : text.substr(pos, eol - pos));
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '|') {
                parts.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (parts.size() != 4) {
            return make_error(ErrorCode::BadConfig,
                              "registry line " + std::to_string(line_no) + ": want 4 fields");
        }
        const std::string& id = parts[0];
        std::optional<std::string> org;
        if (parts[1] != "-" && !parts[1].empty()) org = parts[1];
        RoleSet roles;
        if (parts[2] != "-" && !parts[2].empty()) {
            auto parsed = roles_from_csv(parts[2]);
            if (!parsed) return parsed.error();
            roles = parsed.value();
        }
        auto seed_bytes = from_hex(parts[3]);
        if (!seed_bytes || seed_bytes->size() != 32) {
            return make_error(ErrorCode::BadConfig,
                              "registry line " + std::to_string(line_no) + ": bad seed hex");
        }
        Seed seed;
        std::copy(seed_bytes->begin(), seed_bytes->end(), seed.begin());
        auto added = registry.register_actor(id, org, roles, seed);
        if (!added) return added.error();
    }
    return registry;
}

std::string Registry::render() const {
    std::ostringstream out;
    for (const Actor& actor : actors_) {
        const Credential* cred = credential(actor.actor_id);
        out << actor.actor_id << '|' << (actor.org_id ? *actor.org_id : "-") << '|'
            << (actor.roles.empty() ? "-" : roles_to_csv(actor.roles)) << '|'
            << (cred ? to_hex(cred->seed.data(), cred->seed.size()) : std::string(64, '0'))
            << '\n';
    }
    return out.str();
}

Result<Registry> Registry::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

Status Registry::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return make_error(ErrorCode::IoError, "cannot write " + path);
    out << render();
    return ok_status();
}

Seed random_seed() {
    Seed seed;
    std::random_device device;
    for (std::size_t i = 0; i < seed.size(); i += 4) {
        std::uint32_t word = device();
        seed[i] = static_cast<std::uint8_t>(word);
        seed[i + 1] = static_cast<std::uint8_t>(word >> 8);
        seed[i + 2] = static_cast<std::uint8_t>(word >> 16);
        seed[i + 3] = static_cast<std::uint8_t>(word >> 24);
    }
    return seed;
}

Hash256 pseudonym(const Hash256& salt, std::string_view actor_id) {
    Sha256 hasher;
    hasher.update(salt.bytes.data(), salt.bytes.size());
    hasher.update(actor_id);
    return hasher.finish();
}

std::string onchain_ref(const Actor& actor, const Hash256& salt) {
    if (actor.has_role(Role::DataSubject)) return "~" + pseudonym(salt, actor.actor_id).hex();
    return actor.actor_id;
}

bool is_pseudonym_ref(std::string_view ref) { return !ref.empty() && ref.front() == '~'; }

void PseudonymTable::refresh(const Registry& registry) {
    const auto& actors = registry.actors();
    for (; synced_ < actors.size(); ++synced_) {
        const Actor& actor = actors[synced_];
        by_hex_.emplace(pseudonym(salt_, actor.actor_id).hex(), actor.actor_id);
        raw_ids_.insert(actor.actor_id);
    }
}

std::optional<std::string> PseudonymTable::resolve(std::string_view ref) const {
    if (is_pseudonym_ref(ref)) return actor_for_hex(ref.substr(1));
    if (raw_ids_.count(std::string(ref)) != 0) return std::string(ref);
    return std::nullopt;
}

std::optional<std::string> PseudonymTable::actor_for_hex(std::string_view pseudonym_hex) const {
    auto it = by_hex_.find(pseudonym_hex);
    if (it == by_hex_.end()) return std::nullopt;
    return it->second;
}

}  // namespace consentchain::identity
