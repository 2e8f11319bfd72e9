#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace icp {

/// Canonical JSON: object keys sorted lexicographically, no insignificant
/// whitespace, UTF-8 passthrough. nlohmann::json keeps objects in a std::map,
/// so a plain dump() already satisfies this as long as no floating point
/// values are used (this codebase serializes integers and strings only).
inline std::string canonical_dump(const nlohmann::json& j) {
    return j.dump();
}

/// Non-throwing strict parse; rejects trailing garbage.
inline std::optional<nlohmann::json> parse_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        return std::nullopt;
    }
    return j;
}

}  // namespace icp
