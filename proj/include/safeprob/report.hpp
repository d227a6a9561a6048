#pragma once

// Structured reports. Every command builds an ordered JSON document; the
// text form is a deterministic rendering of the same document.

#include <string>

#include "json.hpp"
#include "safeprob/core.hpp"
#include "safeprob/safety.hpp"

namespace safeprob::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "safeprob 1.0.0";

Json number_json(const Number& x);
Json pmf_json(const Pmf& p, const OutcomeSpace* space);
Json distribution_json(const Distribution& d);
Json verdict_json(const Verdict& v, const OutcomeSpace* space);
Json hierarchy_json(const safety::HierarchyReport& r, const OutcomeSpace* space);

// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

// Nested "key: value" lines, two-space indentation.
std::string render_text(const Json& doc);

}  // namespace safeprob::cli
