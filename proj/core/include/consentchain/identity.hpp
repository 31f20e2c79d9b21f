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

#ifndef CONSENTCHAIN_IDENTITY_HPP
#define CONSENTCHAIN_IDENTITY_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "consentchain/errors.hpp"
#include "consentchain/hash.hpp"

namespace consentchain::identity {

enum class Role { DataSubject, DataController, DataProcessor, Orderer, Auditor };

using RoleSet = std::set<Role>;

std::string_view role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);
std::string roles_to_csv(const RoleSet& roles);
Result<RoleSet> roles_from_csv(std::string_view csv);

using Seed = std::array<std::uint8_t, 32>;

/// Local signing secret. Seeds live only in the process-side registry
/// and the bootstrap file; they are never part of ledger structures.
struct Credential {
    std::string actor_id;
    Seed seed{};
};

/// One registry record. An entry with an empty role set is an
/// organization record; role-bearing entries may link to one via org_id.
struct Actor {
    std::string actor_id;
    std::optional<std::string> org_id;
    RoleSet roles;
    Hash256 public_tag;  // SHA-256 of the seed
    bool active = true;

    bool is_organization() const { return roles.empty(); }
    bool has_role(Role role) const { return roles.count(role) != 0; }
};

/// Pluggable signature scheme. The default is a documented-insecure
/// keyed hash, SHA-256(seed ‖ message): deterministic, 32-byte
/// signatures, identical test vectors in any language. Swap in a real
/// scheme via Registry::set_scheme for anything beyond simulation.
class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual Hash256 sign(const Credential& credential, std::string_view message) const = 0;
    virtual bool verify(const Credential& credential, std::string_view message,
                        const Hash256& signature) const = 0;
};

class SeededHashScheme final : public SignatureScheme {
public:
    Hash256 sign(const Credential& credential, std::string_view message) const override;
    bool verify(const Credential& credential, std::string_view message,
                const Hash256& signature) const override;
};

const SignatureScheme& default_scheme();

Hash256 sign(const Credential& credential, std::string_view message);

/// Append-only membership registry. Reads are safe from any thread;
/// mutations are serialized through the commit path along with all
/// other state changes.
class Registry {
public:
    /// Registers an organization (no roles) or an actor (>=1 role).
    /// DataController/DataProcessor roles require org_id to name a
    /// registered organization; DataSubject forbids org_id.
    Result<Actor> register_actor(const std::string& actor_id,
                                 const std::optional<std::string>& org_id, const RoleSet& roles,
                                 const Seed& seed);
    Result<Actor> register_organization(const std::string& org_id, const Seed& seed);

    const Actor* find(std::string_view actor_id) const;
    Status deactivate(std::string_view actor_id);

    const std::vector<Actor>& actors() const { return actors_; }
    std::size_t size() const { return actors_.size(); }

    const Credential* credential(std::string_view actor_id) const;

    Result<Hash256> sign_as(std::string_view actor_id, std::string_view message) const;
    /// True iff `signature` is what the registered actor would produce.
    Result<bool> verify(std::string_view actor_id, std::string_view message,
                        const Hash256& signature) const;

    void set_scheme(std::shared_ptr<const SignatureScheme> scheme);
    const SignatureScheme& scheme() const;

    /// Bootstrap file: one record per line,
    /// `actor_id|org_id_or_-|role[,role...]|seed_hex`; roles `-` marks an
    /// organization. `#` comments and blank lines allowed.
    static Result<Registry> parse(std::string_view text);
    std::string render() const;
    static Result<Registry> load_file(const std::string& path);
    Status save_file(const std::string& path) const;

private:
    std::vector<Actor> actors_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::map<std::string, Credential, std::less<>> credentials_;
    std::shared_ptr<const SignatureScheme> scheme_;
};

Seed random_seed();

/// Salted one-way pseudonym: SHA-256(salt ‖ actor_id). This is the only
/// form in which a data subject's identity ever reaches the chain.
Hash256 pseudonym(const Hash256& salt, std::string_view actor_id);

/// On-chain actor reference: raw id for institutional actors,
/// `~<pseudonym hex>` for anyone holding the DataSubject role.
std::string onchain_ref(const Actor& actor, const Hash256& salt);
bool is_pseudonym_ref(std::string_view ref);

/// Reverse lookup pseudonym -> actor id for one salt. Refresh after
/// registry growth; lookups are read-only.
class PseudonymTable {
public:
    explicit PseudonymTable(const Hash256& salt) : salt_(salt) {}

    void refresh(const Registry& registry);
    const Hash256& salt() const { return salt_; }

    /// Resolves a raw or `~hex` reference to a registered actor id.
    std::optional<std::string> resolve(std::string_view ref) const;
    std::optional<std::string> actor_for_hex(std::string_view pseudonym_hex) const;

private:
    Hash256 salt_;
    std::map<std::string, std::string, std::less<>> by_hex_;
    std::set<std::string> raw_ids_;
    std::size_t synced_ = 0;
};

}  // namespace consentchain::identity

#endif
