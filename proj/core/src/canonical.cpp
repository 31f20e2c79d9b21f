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

#include "consentchain/canonical.hpp"

#include <algorithm>
#include <cctype>

namespace consentchain {

const std::string KvDocument::kEmpty{};

std::string escape_value(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case ',': out += "\\,"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::optional<std::string> unescape_value(std::string_view escaped) {
    std::string out;
    out.reserve(escaped.size());
    for (std::size_t i = 0; i < escaped.size(); ++i) {
        char c = escaped[i];
        if (c != '\\') {
            if (c == ',' || c == '\n') return std::nullopt;  // must be escaped
            out.push_back(c);
            continue;
        }
        if (i + 1 >= escaped.size()) return std::nullopt;
        char next = escaped[++i];
        switch (next) {
            case '\\': out.push_back('\\'); break;
            case ',': out.push_back(','); break;
            case 'n': out.push_back('\n'); break;
            default: return std::nullopt;
        }
    }
    return out;
}

std::string join_escaped(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += escape_value(items[i]);
    }
    return out;
}

std::optional<std::vector<std::string>> split_escaped(std::string_view joined) {
    std::vector<std::string> out;
    if (joined.empty()) return out;
    bool pending_escape = false;
    std::string token;
    for (char c : joined) {
        if (pending_escape) {
            token.push_back(c);
            pending_escape = false;
            continue;
        }
        if (c == '\\') {
            token.push_back(c);
            pending_escape = true;
            continue;
        }
        if (c == ',') {
            auto raw = unescape_value(token);
            if (!raw) return std::nullopt;
            out.push_back(*std::move(raw));
            token.clear();
            continue;
        }
        token.push_back(c);
    }
    if (pending_escape) return std::nullopt;
    auto raw = unescape_value(token);
    if (!raw) return std::nullopt;
    out.push_back(*std::move(raw));
    return out;
}

std::vector<std::string> split_csv(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(text.substr(start)));
            break;
        }
        out.push_back(trim(text.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::string join_csv(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += items[i];
    }
    return out;
}

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

std::optional<std::int64_t> parse_int64(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (text[0] == '-') {
        negative = true;
        i = 1;
        if (text.size() == 1) return std::nullopt;
    }
    std::int64_t value = 0;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c < '0' || c > '9') return std::nullopt;
        if (value > (INT64_MAX - (c - '0')) / 10) return std::nullopt;
        value = value * 10 + (c - '0');
    }
    return negative ? -value : value;
}

bool is_valid_actor_id(std::string_view id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

bool is_valid_field_name(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

bool is_valid_state_key(std::string_view key) {
    if (key.empty() || key.front() == '/' || key.back() == '/') return false;
    bool prev_slash = false;
    for (char c : key) {
        if (c == '/') {
            if (prev_slash) return false;
            prev_slash = true;
            continue;
        }
        prev_slash = false;
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                  c == '~' || c == '-';
        if (!ok) return false;
    }
    return true;
}

Result<KvDocument> KvDocument::parse(std::string_view text,
                                     const std::vector<std::string>& allowed,
                                     const std::vector<std::string>& required) {
    KvDocument doc;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        std::size_t colon = trimmed.find(':');
        if (colon == std::string::npos) {
            // No key:value shape; report the first token as an unknown key.
            std::size_t space = trimmed.find(' ');
            return make_error(ErrorCode::UnknownKeyName,
                              space == std::string::npos ? trimmed : trimmed.substr(0, space));
        }
        std::string key = trim(std::string_view(trimmed).substr(0, colon));
        std::string value = trim(std::string_view(trimmed).substr(colon + 1));
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            return make_error(ErrorCode::UnknownKeyName, key);
        if (doc.values_.count(key) != 0) return make_error(ErrorCode::DuplicateKey, key);
        doc.values_.emplace(std::move(key), std::move(value));
    }
    for (const auto& key : required) {
        auto it = doc.values_.find(key);
        if (it == doc.values_.end() || it->second.empty())
            return make_error(ErrorCode::MissingKey, key);
    }
    return doc;
}

bool KvDocument::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& KvDocument::get(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? kEmpty : it->second;
}

}  // namespace consentchain
