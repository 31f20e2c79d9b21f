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

#include "consentchain/errors.hpp"

namespace consentchain {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateActor: return "DuplicateActor";
        case ErrorCode::UnknownOrganization: return "UnknownOrganization";
        case ErrorCode::RoleOrgMismatch: return "RoleOrgMismatch";
        case ErrorCode::BadActorId: return "BadActorId";
        case ErrorCode::UnknownActor: return "UnknownActor";
        case ErrorCode::MissingKey: return "MissingKey";
        case ErrorCode::UnknownKeyName: return "UnknownKey";
        case ErrorCode::DuplicateKey: return "DuplicateKey";
        case ErrorCode::EmptyFields: return "EmptyFields";
        case ErrorCode::BadRetention: return "BadRetention";
        case ErrorCode::BadFieldName: return "BadFieldName";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::NotAController: return "NotAController";
        case ErrorCode::NotTheSubject: return "NotTheSubject";
        case ErrorCode::UnknownContract: return "UnknownContract";
        case ErrorCode::UnknownAction: return "UnknownAction";
        case ErrorCode::ConsentRequired: return "ConsentRequired";
        case ErrorCode::MinimizationViolation: return "MinimizationViolation";
        case ErrorCode::RoleDenied: return "RoleDenied";
        case ErrorCode::BadSignature: return "BadSignature";
        case ErrorCode::DuplicateTx: return "DuplicateTx";
        case ErrorCode::NotEndorsed: return "NotEndorsed";
        case ErrorCode::BrokenLink: return "BrokenLink";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::UnknownField: return "UnknownField";
        case ErrorCode::BadRange: return "BadRange";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::UnknownRoute: return "UnknownRoute";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

std::string Error::message() const {
    std::string out(name());
    if (!detail.empty()) {
        out += ": ";
        out += detail;
    }
    return out;
}

}  // namespace consentchain
