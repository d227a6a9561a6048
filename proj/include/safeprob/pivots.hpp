#pragma once

// Discrete pivots: a function U' = f(U, V), injective in U for each V-value,
// whose distribution is the same under every credal vertex.

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "safeprob/core.hpp"
#include "safeprob/safety.hpp"

namespace safeprob::pivots {

class PivotSpec {
   public:
    using Key = std::pair<Value, Value>;  // (u, v)

    PivotSpec(std::string name, std::map<Key, Value> table) : name_(std::move(name)), table_(std::move(table)) {}

    // Reads the pivot off an existing random variable. Pairs (u, v) on which
    // U' takes more than one value are recorded as conflicts.
    static PivotSpec from_rv(const Rv& u, const Rv& v, const Rv& uprime);

    template <class F>
    static PivotSpec from_function(std::string name, const Rv& u, const Rv& v, F&& f) {
        std::map<Key, Value> table;
        for (std::size_t i = 0; i < u.size(); ++i) {
            table.try_emplace({u(i), v(i)}, f(u(i), v(i)));
        }
        return PivotSpec(std::move(name), std::move(table));
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::map<Key, Value>& table() const { return table_; }
    [[nodiscard]] const std::vector<Key>& conflicts() const { return conflicts_; }
    [[nodiscard]] std::optional<Value> at(const Value& u, const Value& v) const;

    // U'(z) = f(U(z), V(z)). InvalidArgument if some realized pair is missing.
    [[nodiscard]] Rv realize(const Rv& u, const Rv& v) const;

   private:
    std::string name_;
    std::map<Key, Value> table_;
    std::vector<Key> conflicts_;
};

struct PivotVerdict {
    bool is_pivot = false;
    bool is_simple = false;
    std::optional<std::string> failure;
};

PivotVerdict check_pivot(const PivotSpec& spec, const Rv& u, const Rv& v, const CredalSet& credal);

// Requires supp_P~(V) = range(V) (NotFullSupport) and a pivot (NotAPivot).
// With W, V must determine W; the pivot property and the law of U' are then
// taken per stratum W=w.
Verdict check_pivotal_safety(const Pmf& ptilde, const Rv& u, const Rv& v, const PivotSpec& spec,
                             const CredalSet& credal, const std::optional<Rv>& w = std::nullopt);

// U' = P~(U=U(z) | V=V(z)). Throws UniquenessViolated when some row gives the
// same nonzero probability to two outcomes.
PivotSpec canonical_pivot(const Pmf& ptilde, const Rv& u, const Rv& v);

struct Theorem3Result {
    bool canonical_marginal = false;  // safety for p~(U|V) | [V]
    bool canonical_pivotal = false;   // pivotal safety with the canonical pivot
    bool simple_pivot_exists = false;
    bool exhaustive = false;          // false: simple_pivot_exists copied from canonical_pivotal
};

inline constexpr std::size_t kPivotSearchAtomCap = 8;

// Hypotheses: full V-support, the uniqueness condition, and P~(u|v) > 0 for
// every jointly realizable (u, v); HypothesisViolated otherwise. Throws
// EquivalenceViolation if the three statements disagree.
Theorem3Result theorem3_check(const Pmf& ptilde, const Rv& u, const Rv& v, const CredalSet& credal,
                              std::size_t search_cap = kPivotSearchAtomCap);

}  // namespace safeprob::pivots
