#pragma once

// Probability update rules Q(U || V): a distribution over range(U) for each
// value of V, not necessarily derived from a joint. Also the translation of
// "observe that the outcome lies in the set v" into random variables.

#include <optional>
#include <string>
#include <vector>

#include "safeprob/core.hpp"
#include "safeprob/safety.hpp"

namespace safeprob::updates {

struct UpdateRule {
    Rv target;       // U
    Rv conditioner;  // V
    std::map<Value, Distribution> rows;  // one per value of V, each over range(U)
};

// Throws ValidationError unless rows cover range(V) and each row is a pmf
// over range(U).
void validate(const UpdateRule& rule);

// Every row puts all its mass on u-values jointly realizable with its v.
bool check_logical_coherence(const UpdateRule& rule, const OutcomeSpace& space);

// A joint with full V-support whose conditional is the rule: uniform over
// range(V), each row's mass split uniformly over the atoms realizing (u, v).
// Absent when the rule is incoherent.
std::optional<Pmf> check_compatibility(const UpdateRule& rule, const OutcomeSpace& space);

// Fails with note "incompatible" when no compatible joint exists; otherwise
// checks safety for U|<V> with the rule completed to a joint.
Verdict prop3_gate(const UpdateRule& rule, const OutcomeSpace& space, const CredalSet& credal);

struct EventScenario {
    std::vector<Value> outcomes;              // base outcomes
    std::vector<Rational> prior;              // P0, aligned with outcomes
    std::vector<std::vector<Value>> observables;  // each a non-empty subset of outcomes
};

struct BuiltEventScenario {
    OutcomeSpace space;
    Rv u;
    Rv v;
    CredalSet credal;
    UpdateRule naive;
};

// Z = {(u, v) : u in v}, ordered by outcome and then by observable. V's
// values are the observables written as "{1,2}". The credal set is the
// polytope {P : P(U) = P0}. ZeroMassObservable when some P0(v) = 0.
BuiltEventScenario build_event_scenario(const EventScenario& ev, std::size_t atom_cap = kDefaultAtomCap);

struct PartitionCheck {
    bool is_partition = false;
    Verdict prop4_verdict;  // validity (U|V) of naive conditioning
};

// The partition test is taken on supp(P0). HypothesisViolated when two
// observables coincide on supp(P0); EquivalenceViolation when the partition
// test and the safety verdict disagree.
PartitionCheck partition_check(const EventScenario& ev, std::size_t atom_cap = kDefaultAtomCap);

}  // namespace safeprob::updates
