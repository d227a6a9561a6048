#include "safeprob/safety.hpp"

#include <algorithm>
#include <sstream>

#include "safeprob/calibration.hpp"
#include "safeprob/detail/exact_linalg.hpp"
#include "safeprob/pivots.hpp"

namespace safeprob {

std::string to_string(const Number& x) {
    if (const auto* r = std::get_if<Rational>(&x)) {
        return r->to_string();
    }
    std::ostringstream os;
    os.precision(17);
    os << std::get<double>(x);
    return os.str();
}

}  // namespace safeprob

namespace safeprob::safety {

namespace {

struct IndexedVertex {
    std::size_t index;
    const Pmf* original;
    Pmf p;
};

struct Failure {
    std::size_t vertex;
    std::optional<Value> v;
    std::optional<Value> u;
    std::optional<std::size_t> component;
    Rational lhs;
    Rational rhs;
    std::string note;
};

std::vector<Rational> as_vector(const Distribution& d) {
    std::vector<Rational> out;
    out.reserve(d.size());
    for (const auto& [_, q] : d) {
        out.push_back(q);
    }
    return out;
}

// Sum over atoms with V = v of P(z) * U(z), componentwise.
std::vector<Rational> partial_moment(const Pmf& p, const Rv& u, const Rv& v, const Value& vv) {
    std::vector<Rational> out(u.arity());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (v(i) == vv && !p[i].is_zero()) {
            const auto& c = u(i).components();
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] += p[i] * c[k];
            }
        }
    }
    return out;
}

Rational joint_probability(const Pmf& p, const Rv& a, const Value& x, const Rv& b, const Value& y) {
    Rational total;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (a(i) == x && b(i) == y) {
            total += p[i];
        }
    }
    return total;
}

// Checks one stratum; returns the first failure in (vertex, value) order.
std::optional<Failure> check_stratum(const SafetyQuery& q, const Pmf& ptilde, const std::vector<IndexedVertex>& vertices) {
    const Rv& u = q.target;
    const Rv& v = q.conditioner;
    const auto table = conditional_table(ptilde, u, v);
    const auto supp_v = support(ptilde, v);
    const auto u_range = u.range();
    const auto v_range = v.range();

    std::map<Value, std::vector<Rational>> means;
    if (q.left == LeftMode::Average) {
        for (const auto& [vv, row] : table.rows) {
            means.emplace(vv, mean(row));
        }
    }

    for (const auto& vx : vertices) {
        const Pmf& p = vx.p;
        const auto p_v = marginal(p, v);

        if (q.left == LeftMode::Full) {
            const auto p_u = marginal(p, u);
            switch (q.right) {
                case RightMode::Plain:
                    for (const auto& vv : v_range) {
                        for (const auto& uu : u_range) {
                            const Rational lhs = joint_probability(p, u, uu, v, vv);
                            const Rational rhs = table.row(vv).at(uu) * p_v.at(vv);
                            if (lhs != rhs) {
                                return Failure{vx.index, vv, uu, std::nullopt, lhs, rhs,
                                               "P(U=u,V=v) differs from P~(U=u|V=v) P(V=v)"};
                            }
                        }
                    }
                    break;
                case RightMode::Angle:
                    for (const auto& uu : u_range) {
                        Rational mixed;
                        for (const auto& vv : v_range) {
                            mixed += table.row(vv).at(uu) * p_v.at(vv);
                        }
                        if (mixed != p_u.at(uu)) {
                            return Failure{vx.index, std::nullopt, uu, std::nullopt, p_u.at(uu), mixed,
                                           "P(U=u) differs from sum_v P~(U=u|V=v) P(V=v)"};
                        }
                    }
                    break;
                case RightMode::Square:
                    for (const auto& vv : supp_v) {
                        for (const auto& uu : u_range) {
                            if (p_u.at(uu) != table.row(vv).at(uu)) {
                                return Failure{vx.index, vv, uu, std::nullopt, p_u.at(uu), table.row(vv).at(uu),
                                               "P(U=u) differs from P~(U=u|V=v)"};
                            }
                        }
                    }
                    break;
                case RightMode::DoubleSquare: {
                    std::vector<Distribution> gens;
                    for (const auto& vv : supp_v) {
                        gens.push_back(table.row(vv));
                    }
                    if (!hull_membership(p_u, gens)) {
                        Failure f{vx.index, std::nullopt, std::nullopt, std::nullopt, Rational(0), Rational(0),
                                  "P(U) = " + to_string(p_u) + " lies outside the hull of the rows P~(U|V=v)"};
                        for (const auto& uu : u_range) {
                            Rational lo = gens.front().at(uu);
                            Rational hi = lo;
                            for (const auto& g : gens) {
                                lo = std::min(lo, g.at(uu));
                                hi = std::max(hi, g.at(uu));
                            }
                            if (p_u.at(uu) < lo || p_u.at(uu) > hi) {
                                f.u = uu;
                                f.lhs = p_u.at(uu);
                                f.rhs = p_u.at(uu) < lo ? lo : hi;
                                break;
                            }
                        }
                        return f;
                    }
                    break;
                }
            }
            continue;
        }

        // Average (mean) left side.
        const auto e = expectation(p, u);
        const std::size_t k_max = e.size();
        switch (q.right) {
            case RightMode::Plain:
                for (const auto& vv : v_range) {
                    const auto lhs = partial_moment(p, u, v, vv);
                    for (std::size_t k = 0; k < k_max; ++k) {
                        const Rational rhs = means.at(vv)[k] * p_v.at(vv);
                        if (lhs[k] != rhs) {
                            return Failure{vx.index, vv, std::nullopt, k, lhs[k], rhs,
                                           "E_P[U 1{V=v}] differs from E~[U|V=v] P(V=v)"};
                        }
                    }
                }
                break;
            case RightMode::Angle:
                for (std::size_t k = 0; k < k_max; ++k) {
                    Rational rhs;
                    for (const auto& vv : v_range) {
                        rhs += p_v.at(vv) * means.at(vv)[k];
                    }
                    if (e[k] != rhs) {
                        return Failure{vx.index, std::nullopt, std::nullopt, k, e[k], rhs,
                                       "E_P[U] differs from E_P[E~[U|V]]"};
                    }
                }
                break;
            case RightMode::Square:
                for (const auto& vv : supp_v) {
                    for (std::size_t k = 0; k < k_max; ++k) {
                        if (e[k] != means.at(vv)[k]) {
                            return Failure{vx.index, vv, std::nullopt, k, e[k], means.at(vv)[k],
                                           "E_P[U] differs from E~[U|V=v]"};
                        }
                    }
                }
                break;
            case RightMode::DoubleSquare:
                for (std::size_t k = 0; k < k_max; ++k) {
                    Rational lo = means.at(supp_v.front())[k];
                    Rational hi = lo;
                    for (const auto& vv : supp_v) {
                        lo = std::min(lo, means.at(vv)[k]);
                        hi = std::max(hi, means.at(vv)[k]);
                    }
                    if (e[k] < lo || e[k] > hi) {
                        return Failure{vx.index, std::nullopt, std::nullopt, k, e[k], e[k] < lo ? lo : hi,
                                       "E_P[U] outside [min_v E~[U|V=v], max_v E~[U|V=v]]"};
                    }
                }
                break;
        }
    }
    return std::nullopt;
}

const char* right_open(RightMode m) {
    switch (m) {
        case RightMode::Plain: return "";
        case RightMode::Angle: return "<";
        case RightMode::Square: return "[";
        case RightMode::DoubleSquare: return "[[";
    }
    return "";
}

const char* right_close(RightMode m) {
    switch (m) {
        case RightMode::Plain: return "";
        case RightMode::Angle: return ">";
        case RightMode::Square: return "]";
        case RightMode::DoubleSquare: return "]]";
    }
    return "";
}

}  // namespace

std::string notation(const SafetyQuery& q) {
    std::string s = q.left == LeftMode::Average ? "<" + q.target.name() + ">" : q.target.name();
    s += "|";
    s += right_open(q.right) + q.conditioner.name() + right_close(q.right);
    if (q.stratifier) {
        s += "," + q.stratifier->name();
    }
    return s;
}

Verdict check_safety(const SafetyQuery& q, const Pmf& ptilde, const CredalSet& credal) {
    const std::size_t n = ptilde.size();
    if (q.target.size() != n || q.conditioner.size() != n || credal.atoms() != n ||
        (q.stratifier && q.stratifier->size() != n)) {
        throw Error(ErrorCode::InvalidArgument, "query, pragmatic distribution and credal set disagree on atoms");
    }
    if (q.left == LeftMode::Average && !q.target.is_numeric()) {
        throw Error(ErrorCode::NonNumericTarget, "average query on non-numeric '" + q.target.name() + "'");
    }
    const Rv guard = q.stratifier ? Rv::joint(q.conditioner, *q.stratifier) : q.conditioner;
    if (!essentially_unique(ptilde, guard, credal)) {
        throw Error(ErrorCode::NotEssentiallyUnique,
                    "some credal vertex supports a value of " + guard.name() + " that P~ gives zero probability");
    }

    Verdict verdict;
    const auto table = conditional_table(ptilde, q.target, q.conditioner);
    for (const auto& vv : table.arbitrary_rows) {
        verdict.notes.push_back("row " + q.conditioner.name() + "=" + vv.to_string() +
                                " has zero P~-probability; filled uniformly");
    }

    auto report = [&](const Failure& f, const std::optional<Value>& w) {
        verdict.holds = false;
        const Pmf& original = credal.vertices()[f.vertex];
        verdict.counterexample = Counterexample{f.vertex, original, f.v, w, f.u, f.component, f.lhs, f.rhs};
        verdict.notes.push_back(f.note);
        if (w) {
            verdict.notes.push_back("evaluated conditionally on " + q.stratifier->name() + "=" + w->to_string());
        }
    };

    if (!q.stratifier) {
        std::vector<IndexedVertex> vs;
        for (std::size_t i = 0; i < credal.vertices().size(); ++i) {
            vs.push_back({i, &credal.vertices()[i], credal.vertices()[i]});
        }
        if (auto f = check_stratum(q, ptilde, vs)) {
            report(*f, std::nullopt);
        }
        return verdict;
    }

    const Rv& w = *q.stratifier;
    for (const auto& ww : support(ptilde, w)) {
        const Pmf pw = condition(ptilde, w, ww);
        std::vector<IndexedVertex> vs;
        for (std::size_t i = 0; i < credal.vertices().size(); ++i) {
            const Pmf& p = credal.vertices()[i];
            if (probability(p, w, ww).is_zero()) {
                continue;
            }
            vs.push_back({i, &p, condition(p, w, ww)});
        }
        if (vs.empty()) {
            verdict.notes.push_back("stratum " + w.name() + "=" + ww.to_string() +
                                    " has zero probability under every credal vertex");
            continue;
        }
        if (auto f = check_stratum(q, pw, vs)) {
            report(*f, ww);
            return verdict;
        }
    }
    return verdict;
}

bool hull_membership(const Distribution& point, const std::vector<Distribution>& generators) {
    if (generators.empty()) {
        return false;
    }
    const auto target = as_vector(point);
    detail::Matrix a(target.size() + 1, detail::Vector(generators.size()));
    detail::Vector b = target;
    b.emplace_back(1);
    for (std::size_t j = 0; j < generators.size(); ++j) {
        if (generators[j].size() != point.size()) {
            throw Error(ErrorCode::InvalidArgument, "hull membership over mismatched value sets");
        }
        std::size_t i = 0;
        for (const auto& [key, q] : generators[j]) {
            if (point.count(key) == 0) {
                throw Error(ErrorCode::InvalidArgument, "hull membership over mismatched value sets");
            }
            a[i++][j] = q;
        }
        a[target.size()][j] = Rational(1);
    }
    return detail::nonnegative_solution(a, b).has_value();
}

const Verdict& HierarchyReport::at(const std::string& notion) const {
    for (const auto& n : notions) {
        if (n.notion == notion) {
            return n.verdict;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "notion '" + notion + "' not in report");
}

HierarchyReport hierarchy_report(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal) {
    HierarchyReport out;
    const bool numeric = u.is_numeric();
    const std::pair<LeftMode, const char*> lefts[] = {{LeftMode::Full, ""}, {LeftMode::Average, "<>"}};
    const RightMode rights[] = {RightMode::Plain, RightMode::Angle, RightMode::Square, RightMode::DoubleSquare};

    for (const auto right : rights) {
        for (const auto& [left, _] : lefts) {
            if (left == LeftMode::Average && !numeric) {
                continue;
            }
            SafetyQuery q{u, left, v, right, std::nullopt};
            // Names use the generic letters so reports are comparable across scenarios.
            SafetyQuery named{Rv("U", u.table()), left, Rv("V", v.table()), right, std::nullopt};
            out.notions.push_back({notation(named), check_safety(q, ptilde, credal)});
        }
    }
    out.notions.push_back({"calibrated", calibration::check_calibrated_full(u, v, ptilde, credal)});

    Verdict pivotal;
    try {
        const auto spec = pivots::canonical_pivot(ptilde, u, v);
        pivotal = pivots::check_pivotal_safety(ptilde, u, v, spec, credal, std::nullopt);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UniquenessViolated && e.code() != ErrorCode::NotFullSupport &&
            e.code() != ErrorCode::NotAPivot) {
            throw;
        }
        pivotal.holds = false;
        pivotal.notes.emplace_back(e.what());
    }
    out.notions.push_back({"pivotal", std::move(pivotal)});

    const std::pair<const char*, const char*> arrows[] = {
        {"U|V", "<U>|V"},         {"<U>|V", "<U>|<V>"},     {"U|V", "U|<V>"},
        {"U|<V>", "<U>|<V>"},     {"<U>|<V>", "<U>|[[V]]"}, {"U|[V]", "U|<V>"},
        {"U|[V]", "<U>|[V]"},     {"<U>|[V]", "<U>|<V>"},   {"U|<V>", "U|[[V]]"},
        {"U|[[V]]", "<U>|[[V]]"}, {"U|V", "calibrated"},    {"U|[V]", "calibrated"},
    };
    auto find = [&](const std::string& name) -> const Verdict* {
        for (const auto& n : out.notions) {
            if (n.notion == name) {
                return &n.verdict;
            }
        }
        return nullptr;
    };
    for (const auto& [from, to] : arrows) {
        const auto* a = find(from);
        const auto* b = find(to);
        if (a != nullptr && b != nullptr && a->holds && !b->holds) {
            out.diagnostics.push_back(std::string("internal error: ") + from + " holds but " + to + " fails");
        }
    }
    return out;
}

}  // namespace safeprob::safety
