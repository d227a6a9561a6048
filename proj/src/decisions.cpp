#include "safeprob/decisions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "safeprob/confidence.hpp"
#include "safeprob/detail/monte_carlo.hpp"

namespace safeprob::decisions {

LossFunction LossFunction::zero_one(bool randomized) {
    LossFunction l;
    l.kind_ = LossKind::ZeroOne;
    l.randomized_ = randomized;
    return l;
}

LossFunction LossFunction::brier() {
    LossFunction l;
    l.kind_ = LossKind::Brier;
    return l;
}

LossFunction LossFunction::log() {
    LossFunction l;
    l.kind_ = LossKind::Log;
    return l;
}

namespace {

Distribution permuted(const Distribution& a, const std::vector<Value>& outcomes, const std::vector<std::size_t>& perm) {
    Distribution out;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        out[outcomes[perm[k]]] = a.at(outcomes[k]);
    }
    return out;
}

}  // namespace

LossFunction LossFunction::custom(std::vector<Value> outcomes, std::vector<Distribution> actions,
                                  std::vector<std::vector<ExtendedRational>> loss) {
    std::sort(outcomes.begin(), outcomes.end());
    if (outcomes.empty() || std::adjacent_find(outcomes.begin(), outcomes.end()) != outcomes.end()) {
        throw Error(ErrorCode::ValidationError, "custom loss needs distinct outcomes");
    }
    if (actions.empty() || loss.size() != actions.size()) {
        throw Error(ErrorCode::ValidationError, "custom loss needs one row of losses per action");
    }
    for (std::size_t a = 0; a < actions.size(); ++a) {
        if (loss[a].size() != outcomes.size() || actions[a].size() != outcomes.size()) {
            throw Error(ErrorCode::ValidationError, "custom loss row " + std::to_string(a) + " has the wrong width");
        }
        Rational total;
        for (const auto& o : outcomes) {
            const auto it = actions[a].find(o);
            if (it == actions[a].end() || it->second.sign() < 0) {
                throw Error(ErrorCode::ValidationError, "custom action " + std::to_string(a) + " is not a pmf over the outcomes");
            }
            total += it->second;
        }
        if (total != Rational(1)) {
            throw Error(ErrorCode::ValidationError, "custom action " + std::to_string(a) + " does not sum to 1");
        }
    }
    if (outcomes.size() > kSymmetryCheckCap) {
        throw Error(ErrorCode::SizeLimit, "symmetry check limited to " + std::to_string(kSymmetryCheckCap) + " outcomes");
    }
    std::vector<std::size_t> perm(outcomes.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (std::size_t a = 0; a < actions.size(); ++a) {
            const auto image = permuted(actions[a], outcomes, perm);
            const auto it = std::find(actions.begin(), actions.end(), image);
            if (it == actions.end()) {
                throw Error(ErrorCode::ValidationError,
                            "custom loss not symmetric: action set not closed under permutations of the outcomes");
            }
            const auto fa = static_cast<std::size_t>(it - actions.begin());
            for (std::size_t k = 0; k < outcomes.size(); ++k) {
                if (!(loss[a][k] == loss[fa][perm[k]])) {
                    throw Error(ErrorCode::ValidationError, "custom loss not symmetric: L(u,a) != L(f(u),f(a)) at u=" +
                                                                outcomes[k].to_string() + ", action " + std::to_string(a));
                }
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    LossFunction l;
    l.kind_ = LossKind::Custom;
    l.outcomes_ = std::move(outcomes);
    l.actions_ = std::move(actions);
    l.table_ = std::move(loss);
    return l;
}

std::string LossFunction::name() const {
    switch (kind_) {
        case LossKind::ZeroOne: return randomized_ ? "zero_one_randomized" : "zero_one";
        case LossKind::Brier: return "brier";
        case LossKind::Log: return "log";
        case LossKind::Custom: return "custom";
    }
    return "";
}

ExtendedRational LossFunction::exact(const Value& u, const Action& a) const {
    switch (kind_) {
        case LossKind::ZeroOne:
            return {false, Rational(1) - a.mass.at(u)};
        case LossKind::Brier: {
            Rational total;
            for (const auto& [x, q] : a.mass) {
                const Rational d = q - (x == u ? Rational(1) : Rational(0));
                total += d * d;
            }
            return {false, total};
        }
        case LossKind::Custom: {
            const auto k = static_cast<std::size_t>(std::lower_bound(outcomes_.begin(), outcomes_.end(), u) -
                                                    outcomes_.begin());
            if (k == outcomes_.size() || !(outcomes_[k] == u) || !a.table_index) {
                throw Error(ErrorCode::InvalidArgument, "custom loss evaluated outside its table");
            }
            return table_[*a.table_index][k];
        }
        case LossKind::Log:
            break;
    }
    throw Error(ErrorCode::InvalidArgument, "log loss has no exact value");
}

double LossFunction::approx(const Value& u, const Action& a) const {
    if (kind_ == LossKind::Log) {
        const double q = a.mass.at(u).to_double();
        return q > 0 ? -std::log(q) : std::numeric_limits<double>::infinity();
    }
    const auto x = exact(u, a);
    return x.infinite ? std::numeric_limits<double>::infinity() : x.finite.to_double();
}

namespace {

// Expected loss with the convention 0 * inf = 0.
ExtendedRational expected(const LossFunction& loss, const Distribution& belief, const Action& a) {
    ExtendedRational total;
    for (const auto& [u, q] : belief) {
        if (q.is_zero()) {
            continue;
        }
        const auto l = loss.exact(u, a);
        if (l.infinite) {
            return ExtendedRational::infinity();
        }
        total.finite += q * l.finite;
    }
    return total;
}

bool less(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite) {
        return false;
    }
    return b.infinite || a.finite < b.finite;
}

}  // namespace

Action bayes_act(const LossFunction& loss, const Distribution& belief) {
    Rational total;
    for (const auto& [_, q] : belief) {
        if (q.sign() < 0) {
            throw Error(ErrorCode::ValidationError, "belief has a negative entry");
        }
        total += q;
    }
    if (belief.empty() || total != Rational(1)) {
        throw Error(ErrorCode::ValidationError, "belief does not sum to 1");
    }

    Action act;
    switch (loss.kind()) {
        case LossKind::Brier:
        case LossKind::Log:
            act.mass = belief;
            return act;
        case LossKind::ZeroOne: {
            Rational best = belief.begin()->second;
            for (const auto& [_, q] : belief) {
                best = std::max(best, q);
            }
            std::vector<Value> modes;
            for (const auto& [u, q] : belief) {
                act.mass[u] = Rational(0);
                if (q == best) {
                    modes.push_back(u);
                }
            }
            act.tie = modes.size() > 1;
            if (loss.randomized()) {
                for (const auto& m : modes) {
                    act.mass[m] = Rational(1, static_cast<long>(modes.size()));
                }
            } else {
                act.mass[modes.front()] = Rational(1);
            }
            return act;
        }
        case LossKind::Custom: {
            std::optional<ExtendedRational> best;
            for (std::size_t a = 0; a < loss.actions().size(); ++a) {
                Action candidate{loss.actions()[a], false, a};
                const auto e = expected(loss, belief, candidate);
                if (!best || less(e, *best)) {
                    best = e;
                    act = candidate;
                    act.tie = false;
                } else if (e == *best) {
                    act.tie = true;
                }
            }
            return act;
        }
    }
    return act;
}

DecisionReport check_decision_safety(const Pmf& ptilde, const Rv& u, const Rv& v, const LossFunction& loss,
                                     const CredalSet& credal) {
    if (ptilde.size() != u.size() || ptilde.size() != v.size() || credal.atoms() != u.size()) {
        throw Error(ErrorCode::InvalidArgument, "pragmatic distribution, credal set and variables disagree on atoms");
    }
    if (!essentially_unique(ptilde, v, credal)) {
        throw Error(ErrorCode::NotEssentiallyUnique,
                    "some credal vertex supports a value of " + v.name() + " that P~ gives zero probability");
    }
    const bool exact = loss.kind() != LossKind::Log;
    const auto table = conditional_table(ptilde, u, v);

    DecisionReport report;
    std::map<Value, Action> policy;
    for (const auto& vv : v.range()) {
        policy.emplace(vv, bayes_act(loss, table.row(vv)));
    }
    for (const auto& vv : support(ptilde, v)) {
        const Action& act = policy.at(vv);
        Number believed;
        if (exact) {
            const auto e = expected(loss, table.row(vv), act);
            believed = e.infinite ? Number(std::numeric_limits<double>::infinity()) : Number(e.finite);
        } else {
            double e = 0;
            for (const auto& [uu, q] : table.row(vv)) {
                if (!q.is_zero()) {
                    e += q.to_double() * loss.approx(uu, act);
                }
            }
            believed = e;
        }
        if (act.tie) {
            report.ties = true;
            report.verdict.notes.push_back("tied Bayes acts at " + v.name() + "=" + vv.to_string() +
                                           "; lowest outcome taken");
        }
        report.rows.push_back({vv, act, believed});
    }

    const auto& vertices = credal.vertices();
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const Pmf& p = vertices[k];
        Number actual;
        if (exact) {
            ExtendedRational total;
            for (std::size_t i = 0; i < p.size() && !total.infinite; ++i) {
                if (p[i].is_zero()) {
                    continue;
                }
                const auto l = loss.exact(u(i), policy.at(v(i)));
                if (l.infinite) {
                    total = ExtendedRational::infinity();
                } else {
                    total.finite += p[i] * l.finite;
                }
            }
            actual = total.infinite ? Number(std::numeric_limits<double>::infinity()) : Number(total.finite);
        } else {
            double total = 0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p[i].is_zero()) {
                    continue;
                }
                const double l = loss.approx(u(i), policy.at(v(i)));
                if (std::isinf(l)) {
                    throw Error(ErrorCode::InfiniteLoss, "log loss is infinite at atom " + std::to_string(i) +
                                                             " under credal vertex " + std::to_string(k));
                }
                total += p[i].to_double() * l;
            }
            actual = total;
        }
        report.actual.push_back(actual);

        if (!report.verdict.holds) {
            continue;
        }
        for (const auto& row : report.rows) {
            bool equal = false;
            if (exact) {
                equal = actual == row.believed;
            } else {
                equal = std::abs(std::get<double>(actual) - std::get<double>(row.believed)) <= kLogLossTolerance;
            }
            if (!equal) {
                report.verdict.holds = false;
                report.verdict.counterexample =
                    Counterexample{k, p, row.v, std::nullopt, std::nullopt, std::nullopt, actual, row.believed};
                report.verdict.notes.push_back("actual expected loss under the vertex differs from the loss P~ "
                                               "predicts given " + v.name() + "=" + row.v.to_string());
                break;
            }
        }
    }
    return report;
}

namespace {

struct GambleShard {
    double actual = 0;
    double believed = 0;
};

}  // namespace

GambleResult gamble_demo(double theta_bar, int n, std::uint64_t samples, std::uint64_t seed) {
    if (!(theta_bar < 0)) {
        throw Error(ErrorCode::DomainError, "the gamble demo needs a negative true mean");
    }
    if (n < 1 || samples == 0) {
        throw Error(ErrorCode::DomainError, "the gamble demo needs n >= 1 and at least one sample");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const auto shards = detail::run_shards<GambleShard>(
        samples, seed, [&](std::mt19937_64& rng, std::uint64_t, std::uint64_t count, GambleShard& acc) {
            std::normal_distribution<double> z(0.0, 1.0);
            for (std::uint64_t j = 0; j < count; ++j) {
                const double estimate = theta_bar + z(rng) / root_n;
                if (estimate > 0) {
                    // Accepting loses 1 when theta < 0; under the confidence
                    // distribution P~(theta > 0 | estimate) = Phi(sqrt(n) estimate).
                    acc.actual += 1.0;
                    acc.believed += 1.0 - 2.0 * confidence::normal_cdf(root_n * estimate);
                }
            }
        });
    GambleResult out;
    for (const auto& s : shards) {
        out.actual_mc += s.actual;
        out.believed_mc += s.believed;
    }
    out.actual_mc /= static_cast<double>(samples);
    out.believed_mc /= static_cast<double>(samples);
    out.actual_closed_form = 1.0 - confidence::normal_cdf(-theta_bar * root_n);
    out.unsafe_gap = out.actual_closed_form > 0 && out.believed_mc < 0;
    return out;
}

}  // namespace safeprob::decisions
