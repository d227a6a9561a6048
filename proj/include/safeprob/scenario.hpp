#pragma once

// Scenario files: JSON documents with a "format": 1 header. All probabilities
// and numeric values are written as strings ("9/10", "0.9", "-2") or JSON
// integers so that they convert to rationals exactly. The schema is in
// docs/scenario-format.md.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safeprob/core.hpp"
#include "safeprob/updates.hpp"

namespace safeprob::cli {

inline constexpr int kFormatVersion = 1;

// P~ given as rows of P~(U | V); completed with the uniform marginal over range(V).
struct ConditionalPragmatic {
    std::string u;
    std::string v;
    std::map<Value, Distribution> rows;
};

struct Scenario {
    OutcomeSpace space;
    std::vector<Rv> rvs;  // file order
    CredalSet credal;
    Pmf pragmatic;
    std::optional<ConditionalPragmatic> conditional;  // set when P~ was given as rows

    // ValidationError naming the variable when absent.
    [[nodiscard]] const Rv& rv(const std::string& name) const;
};

struct ParseOptions {
    std::size_t atom_cap = kDefaultAtomCap;
};

// ParseError (with line and column) for malformed JSON; ValidationError for
// documents that do not describe valid objects.
Scenario parse_scenario(std::string_view text, const ParseOptions& options = {});
Scenario load_scenario(const std::string& path, const ParseOptions& options = {});
// Canonical form: fixed key order, probabilities in lowest terms.
std::string emit_scenario(const Scenario& s);

// {"format": 1, "kind": "events", "outcomes": [...], "prior": {...}, "observables": [[...], ...]}
updates::EventScenario parse_events(std::string_view text);
std::string emit_events(const updates::EventScenario& ev);

// "9/10" -> 9/10, "abc" -> symbol. Used for value literals in files and flags.
Value parse_literal(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace safeprob::cli
