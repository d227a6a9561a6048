#pragma once

// Decision procedures for the safety hierarchy: is a pragmatic distribution
// P~ safe for predicting (some aspect of) U given (some aspect of) V, for every
// distribution in a credal set?

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "safeprob/core.hpp"

namespace safeprob {

using Number = std::variant<Rational, double>;
std::string to_string(const Number& x);

struct Counterexample {
    std::size_t vertex_index = 0;
    Pmf vertex;
    std::optional<Value> v;
    std::optional<Value> w;
    std::optional<Value> u;
    std::optional<std::size_t> component;
    Number lhs;
    Number rhs;
};

struct Verdict {
    bool holds = true;
    std::optional<Counterexample> counterexample;
    std::vector<std::string> notes;
};

}  // namespace safeprob

namespace safeprob::safety {

// Left side: the full distribution of U, or only its mean.
enum class LeftMode { Full, Average };
// Right side: V itself, <V> (on average over V), [V] (ignoring V), [[V]] (range of V).
enum class RightMode { Plain, Angle, Square, DoubleSquare };

struct SafetyQuery {
    Rv target;
    LeftMode left = LeftMode::Full;
    Rv conditioner;
    RightMode right = RightMode::Plain;
    std::optional<Rv> stratifier;
};

// Notation such as "<U>|[V],W".
std::string notation(const SafetyQuery& q);

Verdict check_safety(const SafetyQuery& query, const Pmf& ptilde, const CredalSet& credal);

// Is `point` a convex combination of `generators`? All distributions must share
// the same keys. Decided exactly.
bool hull_membership(const Distribution& point, const std::vector<Distribution>& generators);

struct NotionResult {
    std::string notion;
    Verdict verdict;
};

struct HierarchyReport {
    std::vector<NotionResult> notions;
    // Implication arrows that the individual checks violate. Always empty
    // unless a checker is broken.
    std::vector<std::string> diagnostics;

    [[nodiscard]] const Verdict& at(const std::string& notion) const;
};

// All unstratified notions plus calibration and discrete pivotal safety.
HierarchyReport hierarchy_report(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal);

}  // namespace safeprob::safety
