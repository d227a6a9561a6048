#include "safeprob/updates.hpp"

#include <algorithm>
#include <set>

namespace safeprob::updates {

void validate(const UpdateRule& rule) {
    if (rule.target.size() != rule.conditioner.size()) {
        throw Error(ErrorCode::ValidationError, "update rule variables over different spaces");
    }
    const auto u_range = rule.target.range();
    for (const auto& vv : rule.conditioner.range()) {
        const auto it = rule.rows.find(vv);
        if (it == rule.rows.end()) {
            throw Error(ErrorCode::ValidationError, "update rule has no row for " + rule.conditioner.name() + "=" +
                                                        vv.to_string());
        }
        Rational total;
        for (const auto& uu : u_range) {
            const auto q = it->second.find(uu);
            if (q == it->second.end() || q->second.sign() < 0) {
                throw Error(ErrorCode::ValidationError, "row " + vv.to_string() + " is not a pmf over range(" +
                                                            rule.target.name() + ")");
            }
            total += q->second;
        }
        if (it->second.size() != u_range.size() || total != Rational(1)) {
            throw Error(ErrorCode::ValidationError, "row " + vv.to_string() + " does not sum to 1 over range(" +
                                                        rule.target.name() + ")");
        }
    }
    if (rule.rows.size() != rule.conditioner.range().size()) {
        throw Error(ErrorCode::ValidationError, "update rule has rows for values " + rule.conditioner.name() +
                                                    " never takes");
    }
}

namespace {

void require_space(const UpdateRule& rule, const OutcomeSpace& space) {
    if (rule.target.size() != space.size()) {
        throw Error(ErrorCode::InvalidArgument, "update rule and outcome space disagree on atoms");
    }
    validate(rule);
}

}  // namespace

bool check_logical_coherence(const UpdateRule& rule, const OutcomeSpace& space) {
    require_space(rule, space);
    for (const auto& [vv, row] : rule.rows) {
        const auto realizable = rule.target.range_given(rule.conditioner, vv);
        for (const auto& [uu, q] : row) {
            if (!q.is_zero() && !std::binary_search(realizable.begin(), realizable.end(), uu)) {
                return false;
            }
        }
    }
    return true;
}

std::optional<Pmf> check_compatibility(const UpdateRule& rule, const OutcomeSpace& space) {
    if (!check_logical_coherence(rule, space)) {
        return std::nullopt;
    }
    const Rv& u = rule.target;
    const Rv& v = rule.conditioner;
    const Rational per_v(1, static_cast<long>(rule.rows.size()));
    std::vector<Rational> w(space.size());
    for (const auto& [vv, row] : rule.rows) {
        for (const auto& [uu, q] : row) {
            if (q.is_zero()) {
                continue;
            }
            std::vector<std::size_t> atoms;
            for (std::size_t i = 0; i < space.size(); ++i) {
                if (u(i) == uu && v(i) == vv) {
                    atoms.push_back(i);
                }
            }
            const Rational share = per_v * q / Rational(static_cast<long>(atoms.size()));
            for (const auto i : atoms) {
                w[i] += share;
            }
        }
    }
    return Pmf(std::move(w));
}

Verdict prop3_gate(const UpdateRule& rule, const OutcomeSpace& space, const CredalSet& credal) {
    const auto joint = check_compatibility(rule, space);
    if (!joint) {
        Verdict out;
        out.holds = false;
        out.notes.emplace_back("incompatible: no joint distribution has this rule as its conditional");
        return out;
    }
    return safety::check_safety({rule.target, safety::LeftMode::Full, rule.conditioner, safety::RightMode::Angle,
                                 std::nullopt},
                                *joint, credal);
}

namespace {

std::string set_label(const std::vector<Value>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += (i ? "," : "") + s[i].to_string();
    }
    return out + "}";
}

struct Normalized {
    std::vector<Value> outcomes;
    std::vector<Rational> prior;
    std::vector<std::vector<Value>> observables;  // sorted elements, in input order
};

Normalized normalize(const EventScenario& ev) {
    if (ev.outcomes.empty() || ev.outcomes.size() != ev.prior.size()) {
        throw Error(ErrorCode::ValidationError, "event scenario needs one prior weight per outcome");
    }
    std::set<Value> seen(ev.outcomes.begin(), ev.outcomes.end());
    if (seen.size() != ev.outcomes.size()) {
        throw Error(ErrorCode::ValidationError, "duplicate outcome in event scenario");
    }
    Rational total;
    for (const auto& q : ev.prior) {
        if (q.sign() < 0) {
            throw Error(ErrorCode::ValidationError, "negative prior weight");
        }
        total += q;
    }
    if (total != Rational(1)) {
        throw Error(ErrorCode::ValidationError, "prior sums to " + total.to_string() + ", not 1");
    }
    if (ev.observables.empty()) {
        throw Error(ErrorCode::ValidationError, "event scenario needs at least one observable set");
    }
    Normalized out{ev.outcomes, ev.prior, {}};
    std::set<std::vector<Value>> distinct;
    for (const auto& s : ev.observables) {
        std::vector<Value> sorted(s.begin(), s.end());
        std::sort(sorted.begin(), sorted.end());
        if (sorted.empty()) {
            throw Error(ErrorCode::ValidationError, "empty observable set");
        }
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw Error(ErrorCode::ValidationError, "observable set " + set_label(sorted) + " repeats an outcome");
        }
        for (const auto& x : sorted) {
            if (seen.count(x) == 0) {
                throw Error(ErrorCode::ValidationError, "observable set " + set_label(sorted) +
                                                            " mentions unknown outcome " + x.to_string());
            }
        }
        if (!distinct.insert(sorted).second) {
            throw Error(ErrorCode::ValidationError, "observable set " + set_label(sorted) + " listed twice");
        }
        out.observables.push_back(std::move(sorted));
    }
    return out;
}

bool contains(const std::vector<Value>& s, const Value& x) { return std::binary_search(s.begin(), s.end(), x); }

}  // namespace

BuiltEventScenario build_event_scenario(const EventScenario& ev, std::size_t atom_cap) {
    const auto n = normalize(ev);

    std::vector<std::string> atoms;
    std::vector<Value> u_table;
    std::vector<Value> v_table;
    for (std::size_t k = 0; k < n.outcomes.size(); ++k) {
        bool covered = false;
        for (const auto& s : n.observables) {
            if (contains(s, n.outcomes[k])) {
                covered = true;
                atoms.push_back("(" + n.outcomes[k].to_string() + "," + set_label(s) + ")");
                u_table.push_back(n.outcomes[k]);
                v_table.push_back(Value::symbol(set_label(s)));
            }
        }
        if (!covered && !n.prior[k].is_zero()) {
            throw Error(ErrorCode::ValidationError, "outcome " + n.outcomes[k].to_string() +
                                                        " has positive prior but lies in no observable set");
        }
    }
    if (atoms.size() > atom_cap) {
        throw Error(ErrorCode::SizeLimit, "event scenario needs " + std::to_string(atoms.size()) +
                                              " atoms; the cap is " + std::to_string(atom_cap));
    }
    OutcomeSpace space(atoms);
    Rv u("U", u_table);
    Rv v("V", v_table);

    std::vector<LinearConstraint> constraints;
    for (std::size_t k = 0; k < n.outcomes.size(); ++k) {
        LinearConstraint c{std::vector<Rational>(atoms.size()), Relation::Equal, n.prior[k]};
        bool any = false;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (u(i) == n.outcomes[k]) {
                c.coeffs[i] = Rational(1);
                any = true;
            }
        }
        if (any) {
            constraints.push_back(std::move(c));
        }
    }
    CredalSet credal = CredalSet::from_constraints(space, constraints, atom_cap);

    std::map<Value, Distribution> rows;
    const auto u_range = u.range();
    for (const auto& s : n.observables) {
        Rational mass;
        for (std::size_t k = 0; k < n.outcomes.size(); ++k) {
            if (contains(s, n.outcomes[k])) {
                mass += n.prior[k];
            }
        }
        if (mass.is_zero()) {
            throw Error(ErrorCode::ZeroMassObservable, "observable set " + set_label(s) + " has prior probability 0");
        }
        Distribution row;
        for (const auto& uu : u_range) {
            row[uu] = Rational(0);
        }
        for (std::size_t k = 0; k < n.outcomes.size(); ++k) {
            if (contains(s, n.outcomes[k])) {
                row[n.outcomes[k]] = n.prior[k] / mass;
            }
        }
        rows.emplace(Value::symbol(set_label(s)), std::move(row));
    }
    UpdateRule naive{u, v, std::move(rows)};
    return {std::move(space), std::move(u), std::move(v), std::move(credal), std::move(naive)};
}

PartitionCheck partition_check(const EventScenario& ev, std::size_t atom_cap) {
    const auto n = normalize(ev);
    auto built = build_event_scenario(ev, atom_cap);

    std::vector<std::vector<Value>> restricted;
    for (const auto& s : n.observables) {
        std::vector<Value> r;
        for (const auto& x : s) {
            const auto k = static_cast<std::size_t>(std::find(n.outcomes.begin(), n.outcomes.end(), x) -
                                                    n.outcomes.begin());
            if (!n.prior[k].is_zero()) {
                r.push_back(x);
            }
        }
        restricted.push_back(std::move(r));
    }
    PartitionCheck out;
    out.is_partition = true;
    for (std::size_t i = 0; i < restricted.size(); ++i) {
        for (std::size_t j = i + 1; j < restricted.size(); ++j) {
            if (restricted[i] == restricted[j]) {
                throw Error(ErrorCode::HypothesisViolated, "observable sets " + set_label(n.observables[i]) + " and " +
                                                               set_label(n.observables[j]) +
                                                               " coincide on the support of the prior");
            }
            for (const auto& x : restricted[i]) {
                if (contains(restricted[j], x)) {
                    out.is_partition = false;
                }
            }
        }
    }

    const auto joint = check_compatibility(built.naive, built.space);
    if (!joint) {
        throw Error(ErrorCode::EquivalenceViolation, "naive conditioning is not logically coherent");
    }
    out.prop4_verdict = safety::check_safety(
        {built.u, safety::LeftMode::Full, built.v, safety::RightMode::Plain, std::nullopt}, *joint, built.credal);
    if (out.is_partition != out.prop4_verdict.holds) {
        throw Error(ErrorCode::EquivalenceViolation,
                    std::string("partition=") + (out.is_partition ? "true" : "false") +
                        " but naive conditioning is " + (out.prop4_verdict.holds ? "valid" : "not valid"));
    }
    return out;
}

}  // namespace safeprob::updates
