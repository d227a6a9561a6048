#include "safeprob/pivots.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace safeprob::pivots {

PivotSpec PivotSpec::from_rv(const Rv& u, const Rv& v, const Rv& uprime) {
    if (u.size() != v.size() || u.size() != uprime.size()) {
        throw Error(ErrorCode::InvalidArgument, "pivot variables over different spaces");
    }
    std::map<Key, Value> table;
    std::set<Key> conflicts;
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto [it, inserted] = table.try_emplace({u(i), v(i)}, uprime(i));
        if (!inserted && !(it->second == uprime(i))) {
            conflicts.insert(it->first);
        }
    }
    PivotSpec spec(uprime.name(), std::move(table));
    spec.conflicts_.assign(conflicts.begin(), conflicts.end());
    return spec;
}

std::optional<Value> PivotSpec::at(const Value& u, const Value& v) const {
    const auto it = table_.find({u, v});
    if (it == table_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Rv PivotSpec::realize(const Rv& u, const Rv& v) const {
    std::vector<Value> out;
    out.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = at(u(i), v(i));
        if (!x) {
            throw Error(ErrorCode::InvalidArgument, "pivot '" + name_ + "' undefined at (" + u(i).to_string() + ", " +
                                                        v(i).to_string() + ")");
        }
        out.push_back(*x);
    }
    return Rv(name_, std::move(out));
}

namespace {

// Clauses 1 and 2 plus simplicity; clause 3 is left to the caller.
PivotVerdict check_structure(const PivotSpec& spec, const Rv& u, const Rv& v) {
    PivotVerdict out;
    if (!spec.conflicts().empty()) {
        const auto& [cu, cv] = spec.conflicts().front();
        out.failure = "pivot not a function of (U,V) at (" + cu.to_string() + ", " + cv.to_string() + ")";
        return out;
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!spec.at(u(i), v(i))) {
            out.failure = "pivot undefined at (" + u(i).to_string() + ", " + v(i).to_string() + ")";
            return out;
        }
    }
    const Rv uprime = spec.realize(u, v);
    const auto full_range = uprime.range();
    bool simple = true;
    for (const auto& vv : v.range()) {
        std::set<Value> image;
        const auto us = u.range_given(v, vv);
        for (const auto& uu : us) {
            if (!image.insert(*spec.at(uu, vv)).second) {
                out.failure = "f_v not injective at v=" + vv.to_string();
                return out;
            }
        }
        if (image.size() != full_range.size()) {
            simple = false;
        }
    }
    out.is_pivot = true;
    out.is_simple = simple;
    return out;
}

std::optional<std::string> credal_disagreement(const Rv& uprime, const std::vector<const Pmf*>& vertices,
                                               const std::vector<std::size_t>& index) {
    if (vertices.empty()) {
        return std::nullopt;
    }
    const auto first = marginal(*vertices.front(), uprime);
    for (std::size_t k = 1; k < vertices.size(); ++k) {
        if (marginal(*vertices[k], uprime) != first) {
            return "credal vertices " + std::to_string(index.front()) + " and " + std::to_string(index[k]) +
                   " disagree on P(" + uprime.name() + ")";
        }
    }
    return std::nullopt;
}

}  // namespace

PivotVerdict check_pivot(const PivotSpec& spec, const Rv& u, const Rv& v, const CredalSet& credal) {
    auto out = check_structure(spec, u, v);
    if (!out.is_pivot) {
        return out;
    }
    const Rv uprime = spec.realize(u, v);
    std::vector<const Pmf*> vs;
    std::vector<std::size_t> index;
    for (std::size_t k = 0; k < credal.vertices().size(); ++k) {
        vs.push_back(&credal.vertices()[k]);
        index.push_back(k);
    }
    if (auto why = credal_disagreement(uprime, vs, index)) {
        out.is_pivot = false;
        out.is_simple = false;
        out.failure = std::move(why);
    }
    return out;
}

Verdict check_pivotal_safety(const Pmf& ptilde, const Rv& u, const Rv& v, const PivotSpec& spec,
                             const CredalSet& credal, const std::optional<Rv>& w) {
    if (ptilde.size() != u.size() || ptilde.size() != v.size() || credal.atoms() != u.size()) {
        throw Error(ErrorCode::InvalidArgument, "pragmatic distribution, credal set and variables disagree on atoms");
    }
    if (support(ptilde, v) != v.range()) {
        throw Error(ErrorCode::NotFullSupport, "P~ does not give every value of " + v.name() + " positive probability");
    }
    const auto structure = check_structure(spec, u, v);
    if (!structure.is_pivot) {
        throw Error(ErrorCode::NotAPivot, *structure.failure);
    }
    const Rv uprime = spec.realize(u, v);
    const Rv stratifier = w ? *w : Rv::constant("0", u.size());
    const auto f = determines(v, stratifier);
    if (!f) {
        throw Error(ErrorCode::InvalidArgument, v.name() + " does not determine " + stratifier.name());
    }
    const auto table = conditional_table(ptilde, uprime, v);

    Verdict verdict;
    for (const auto& ww : stratifier.range()) {
        std::vector<const Pmf*> vs;
        std::vector<std::size_t> index;
        std::vector<Pmf> conditioned;
        for (std::size_t k = 0; k < credal.vertices().size(); ++k) {
            if (!probability(credal.vertices()[k], stratifier, ww).is_zero()) {
                index.push_back(k);
                conditioned.push_back(condition(credal.vertices()[k], stratifier, ww));
            }
        }
        for (const auto& p : conditioned) {
            vs.push_back(&p);
        }
        if (auto why = credal_disagreement(uprime, vs, index)) {
            throw Error(ErrorCode::NotAPivot, *why + (w ? " given " + w->name() + "=" + ww.to_string() : ""));
        }
        for (std::size_t j = 0; j < conditioned.size(); ++j) {
            const auto law = marginal(conditioned[j], uprime);
            for (const auto& vv : v.range()) {
                if (!(f->at(vv) == ww)) {
                    continue;
                }
                for (const auto& [x, px] : law) {
                    const Rational believed = table.row(vv).at(x);
                    if (believed != px) {
                        verdict.holds = false;
                        const std::size_t k = index[j];
                        verdict.counterexample = Counterexample{k,  credal.vertices()[k], vv, w ? std::optional(ww) : std::nullopt,
                                                                x,  std::nullopt,         believed, px};
                        verdict.notes.push_back("P~(" + uprime.name() + "=x|" + v.name() +
                                                "=v) differs from the credal law of " + uprime.name());
                        return verdict;
                    }
                }
            }
        }
    }
    if (!structure.is_simple) {
        verdict.notes.push_back("pivot is not simple");
    }
    return verdict;
}

PivotSpec canonical_pivot(const Pmf& ptilde, const Rv& u, const Rv& v) {
    const auto table = conditional_table(ptilde, u, v);
    for (const auto& [vv, row] : table.rows) {
        std::map<Rational, Value> seen;
        for (const auto& [uu, q] : row) {
            if (q.is_zero()) {
                continue;
            }
            auto [it, inserted] = seen.emplace(q, uu);
            if (!inserted) {
                throw Error(ErrorCode::UniquenessViolated, "row " + v.name() + "=" + vv.to_string() + " gives " +
                                                               q.to_string() + " to both " + it->second.to_string() +
                                                               " and " + uu.to_string());
            }
        }
    }
    return PivotSpec::from_function("p~(" + u.name() + "|" + v.name() + ")", u, v,
                                    [&](const Value& uu, const Value& vv) { return Value::numeric(table.row(vv).at(uu)); });
}

namespace {

bool pivotally_safe(const Pmf& ptilde, const Rv& u, const Rv& v, const PivotSpec& spec, const CredalSet& credal) {
    try {
        return check_pivotal_safety(ptilde, u, v, spec, credal).holds;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotAPivot) {
            return false;
        }
        throw;
    }
}

// Tries every simple pivot with labels 0..m-1, up to relabeling (f at the
// first value of V is fixed to the identity order).
bool search_simple_pivot(const Pmf& ptilde, const Rv& u, const Rv& v, const CredalSet& credal) {
    const auto v_range = v.range();
    std::vector<std::vector<Value>> cells;
    for (const auto& vv : v_range) {
        cells.push_back(u.range_given(v, vv));
    }
    const std::size_t m = cells.front().size();
    for (const auto& c : cells) {
        if (c.size() != m) {
            return false;
        }
    }
    std::vector<std::vector<std::size_t>> perm(cells.size(), std::vector<std::size_t>(m));
    for (auto& p : perm) {
        std::iota(p.begin(), p.end(), 0);
    }
    while (true) {
        std::map<PivotSpec::Key, Value> table;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            for (std::size_t i = 0; i < m; ++i) {
                table.emplace(PivotSpec::Key{cells[j][i], v_range[j]},
                              Value::numeric(Rational(static_cast<long>(perm[j][i]))));
            }
        }
        if (pivotally_safe(ptilde, u, v, PivotSpec("U'", std::move(table)), credal)) {
            return true;
        }
        std::size_t j = 1;
        while (j < perm.size() && !std::next_permutation(perm[j].begin(), perm[j].end())) {
            ++j;  // next_permutation wrapped this digit back to identity
        }
        if (j >= perm.size()) {
            return false;
        }
    }
}

}  // namespace

Theorem3Result theorem3_check(const Pmf& ptilde, const Rv& u, const Rv& v, const CredalSet& credal,
                              std::size_t search_cap) {
    if (support(ptilde, v) != v.range()) {
        throw Error(ErrorCode::HypothesisViolated, "P~ does not give every value of " + v.name() + " positive probability");
    }
    const auto table = conditional_table(ptilde, u, v);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (table.row(v(i)).at(u(i)).is_zero()) {
            throw Error(ErrorCode::HypothesisViolated, "P~(" + u.name() + "=" + u(i).to_string() + "|" + v.name() + "=" +
                                                           v(i).to_string() + ") = 0 for a realizable pair");
        }
    }
    PivotSpec spec = [&] {
        try {
            return canonical_pivot(ptilde, u, v);
        } catch (const Error& e) {
            throw Error(ErrorCode::HypothesisViolated, e.what());
        }
    }();

    Theorem3Result out;
    const Rv uprime = spec.realize(u, v);
    out.canonical_marginal =
        safety::check_safety({uprime, safety::LeftMode::Full, v, safety::RightMode::Square, std::nullopt}, ptilde, credal)
            .holds;
    out.canonical_pivotal = pivotally_safe(ptilde, u, v, spec, credal);
    if (u.size() <= search_cap) {
        out.exhaustive = true;
        out.simple_pivot_exists = search_simple_pivot(ptilde, u, v, credal);
    } else {
        out.simple_pivot_exists = out.canonical_pivotal;
    }
    if (out.canonical_marginal != out.canonical_pivotal || out.canonical_pivotal != out.simple_pivot_exists) {
        throw Error(ErrorCode::EquivalenceViolation,
                    std::string("safe for p~(U|V)|[V]=") + (out.canonical_marginal ? "true" : "false") +
                        ", canonical pivotal safety=" + (out.canonical_pivotal ? "true" : "false") +
                        ", simple pivot found=" + (out.simple_pivot_exists ? "true" : "false"));
    }
    return out;
}

}  // namespace safeprob::pivots
