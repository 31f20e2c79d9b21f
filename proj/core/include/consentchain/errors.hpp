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

#ifndef CONSENTCHAIN_ERRORS_HPP
#define CONSENTCHAIN_ERRORS_HPP

#include <cassert>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace consentchain {

/// Governance and plumbing error codes. Each maps to a stable name that
/// surfaces verbatim at the CLI and the query API.
enum class ErrorCode {
    // identity
    DuplicateActor,
    UnknownOrganization,
    RoleOrgMismatch,
    BadActorId,
    UnknownActor,
    // declaration / config parsing
    MissingKey,
    UnknownKeyName,  // unknown key in a key:value document
    DuplicateKey,
    EmptyFields,
    BadRetention,
    BadFieldName,
    BadConfig,
    // consent
    IllegalTransition,
    NotAController,
    NotTheSubject,
    // contracts
    UnknownContract,
    UnknownAction,
    ConsentRequired,
    MinimizationViolation,
    RoleDenied,
    BadSignature,
    // ordering / ledger
    DuplicateTx,
    NotEndorsed,
    BrokenLink,
    // queries
    UnknownKey,  // state/provenance key lookup miss
    UnknownField,
    BadRange,
    BadParams,
    UnknownRoute,
    // plumbing
    IoError,
};

/// Stable error name, e.g. "IllegalTransition".
std::string_view error_name(ErrorCode code);

struct Error {
    ErrorCode code;
    std::string detail;

    std::string_view name() const { return error_name(code); }
    std::string message() const;
};

inline Error make_error(ErrorCode code, std::string detail = {}) {
    return Error{code, std::move(detail)};
}

/// Minimal expected-style result. Rejections are ordinary outcomes here
/// (an invalid transaction still lands on the chain), so errors flow as
/// values, not exceptions.
template <typename T>
class Result {
public:
    Result(T value) : value_(std::in_place_index<0>, std::move(value)) {}
    Result(Error error) : value_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return value_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        assert(ok());
        return std::get<0>(value_);
    }
    T& value() & {
        assert(ok());
        return std::get<0>(value_);
    }
    T&& take() && {
        assert(ok());
        return std::get<0>(std::move(value_));
    }
    const Error& error() const {
        assert(!ok());
        return std::get<1>(value_);
    }

private:
    std::variant<T, Error> value_;
};

struct Unit {};
using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

}  // namespace consentchain

#endif
