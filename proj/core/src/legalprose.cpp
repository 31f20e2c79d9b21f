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

#include "consentchain/legalprose.hpp"

#include <algorithm>
#include <set>

#include "consentchain/canonical.hpp"

namespace consentchain::prose {

namespace {

const std::vector<std::string> kKeys = {"id",     "controller",     "processors", "purpose",
                                        "fields", "retention_days", "scenario"};
const std::vector<std::string> kNonEmpty = {"id", "controller", "purpose", "retention_days"};

}  // namespace

bool PurposeDeclaration::allows_field(std::string_view field) const {
    return std::find(allowed_fields.begin(), allowed_fields.end(), field) !=
           allowed_fields.end();
}

Result<PurposeDeclaration> parse_declaration(std::string_view text) {
    auto doc = KvDocument::parse(text, kKeys, kNonEmpty);
    if (!doc) return doc.error();

    // processors, fields and scenario lines must exist but may carry an
    // empty value (fields gets its own emptiness error below).
    for (const char* key : {"processors", "fields", "scenario"}) {
        if (!doc.value().has(key)) return make_error(ErrorCode::MissingKey, key);
    }

    PurposeDeclaration decl;
    decl.declaration_id = doc.value().get("id");
    decl.controller = doc.value().get("controller");
    if (!is_valid_actor_id(decl.controller))
        return make_error(ErrorCode::BadActorId, decl.controller);

    for (const auto& token : split_csv(doc.value().get("processors"))) {
        if (!is_valid_actor_id(token)) return make_error(ErrorCode::BadActorId, token);
        if (std::find(decl.processors.begin(), decl.processors.end(), token) ==
            decl.processors.end())
            decl.processors.push_back(token);
    }

    decl.purpose_text = doc.value().get("purpose");

    std::set<std::string> fields;
    for (const auto& token : split_csv(doc.value().get("fields"))) {
        if (!is_valid_field_name(token)) return make_error(ErrorCode::BadFieldName, token);
        fields.insert(token);
    }
    if (fields.empty()) return make_error(ErrorCode::EmptyFields, "fields");
    decl.allowed_fields.assign(fields.begin(), fields.end());

    auto retention = parse_int64(doc.value().get("retention_days"));
    if (!retention || *retention <= 0)
        return make_error(ErrorCode::BadRetention, doc.value().get("retention_days"));
    decl.retention_days = *retention;

    decl.scenario = doc.value().get("scenario");
    return decl;
}

std::string render_canonical(const PurposeDeclaration& declaration) {
    std::vector<std::string> fields = declaration.allowed_fields;
    std::sort(fields.begin(), fields.end());
    std::string out;
    out += "id:" + declaration.declaration_id + "\n";
    out += "controller:" + declaration.controller + "\n";
    out += "processors:" + join_csv(declaration.processors) + "\n";
    out += "purpose:" + declaration.purpose_text + "\n";
    out += "fields:" + join_csv(fields) + "\n";
    out += "retention_days:" + std::to_string(declaration.retention_days) + "\n";
    out += "scenario:" + declaration.scenario + "\n";
    return out;
}

Hash256 hash_declaration(const PurposeDeclaration& declaration) {
    return sha256(render_canonical(declaration));
}

std::vector<std::string> check_field_subset(const PurposeDeclaration& declaration,
                                            const std::vector<std::string>& submitted_fields) {
    std::set<std::string> violations;
    for (const auto& field : submitted_fields) {
        if (!declaration.allows_field(field)) violations.insert(field);
    }
    return {violations.begin(), violations.end()};
}

}  // namespace consentchain::prose
