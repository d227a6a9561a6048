#include "safeprob/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "safeprob/detail/exact_linalg.hpp"

namespace safeprob {

// --- OutcomeSpace -----------------------------------------------------------

OutcomeSpace::OutcomeSpace(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
        throw Error(ErrorCode::ValidationError, "outcome space must be non-empty");
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (!index_.emplace(atoms_[i], i).second) {
            throw Error(ErrorCode::ValidationError, "duplicate atom '" + atoms_[i] + "'");
        }
    }
}

std::optional<std::size_t> OutcomeSpace::index_of(const std::string& atom) const {
    if (auto it = index_.find(atom); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

// --- Value ------------------------------------------------------------------

Value Value::numeric(std::vector<Rational> xs) {
    if (xs.empty()) {
        throw Error(ErrorCode::InvalidArgument, "numeric value needs at least one component");
    }
    return Value(std::move(xs));
}

const Rational& Value::scalar() const {
    if (!is_numeric() || components().size() != 1) {
        throw Error(ErrorCode::NonNumericTarget, "value " + to_string() + " is not a numeric scalar");
    }
    return components().front();
}

std::string Value::to_string() const {
    if (!is_numeric()) {
        return symbol_name();
    }
    const auto& xs = components();
    if (xs.size() == 1) {
        return xs.front().to_string();
    }
    std::string s = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i != 0) {
            s += ",";
        }
        s += xs[i].to_string();
    }
    return s + ")";
}

bool operator<(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) {
        return a.v_.index() < b.v_.index();
    }
    if (a.is_numeric()) {
        return a.components() < b.components();
    }
    return a.symbol_name() < b.symbol_name();
}

// --- Rv ---------------------------------------------------------------------

namespace {

// Injective rendering used to build joint labels.
std::string quoted(const Value& v) {
    if (v.is_numeric()) {
        return v.to_string();
    }
    std::string s = "\"";
    for (char c : v.symbol_name()) {
        if (c == '"' || c == '\\') {
            s += '\\';
        }
        s += c;
    }
    return s + "\"";
}

}  // namespace

Rv::Rv(std::string name, std::vector<Value> table) : name_(std::move(name)), table_(std::move(table)) {
    if (table_.empty()) {
        throw Error(ErrorCode::ValidationError, "random variable '" + name_ + "' has an empty table");
    }
    const bool numeric = table_.front().is_numeric();
    const std::size_t arity = table_.front().arity();
    for (const auto& v : table_) {
        if (v.is_numeric() != numeric || v.arity() != arity) {
            throw Error(ErrorCode::ValidationError,
                        "random variable '" + name_ + "' mixes value kinds or numeric arities");
        }
    }
}

Rv Rv::constant(std::string name, std::size_t atoms, Value value) {
    return Rv(std::move(name), std::vector<Value>(atoms, value));
}

Rv Rv::joint(const Rv& a, const Rv& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::InvalidArgument, "joint of random variables over different spaces");
    }
    std::vector<Value> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.push_back(Value::symbol("<" + quoted(a(i)) + ";" + quoted(b(i)) + ">"));
    }
    return Rv("(" + a.name() + "," + b.name() + ")", std::move(out));
}

Rv Rv::indicator(std::string name, const Rv& x, const Value& value) {
    return map(std::move(name), x,
               [&](const Value& v) { return Value::numeric(Rational(v == value ? 1 : 0)); });
}

std::vector<Value> Rv::range() const {
    std::vector<Value> out(table_.begin(), table_.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Value> Rv::range_given(const Rv& given, const Value& g) const {
    std::vector<Value> out;
    for (std::size_t i = 0; i < table_.size(); ++i) {
        if (given(i) == g) {
            out.push_back(table_[i]);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// --- Pmf --------------------------------------------------------------------

Pmf::Pmf(std::vector<Rational> weights) : w_(std::move(weights)) {
    if (w_.empty()) {
        throw Error(ErrorCode::ValidationError, "distribution over an empty space");
    }
    Rational total;
    for (const auto& x : w_) {
        if (x.sign() < 0) {
            throw Error(ErrorCode::ValidationError, "negative probability " + x.to_string());
        }
        total += x;
    }
    if (total != Rational(1)) {
        throw Error(ErrorCode::ValidationError, "probabilities sum to " + total.to_string() + ", not 1");
    }
}

Pmf Pmf::point_mass(std::size_t atoms, std::size_t at) {
    std::vector<Rational> w(atoms);
    w.at(at) = Rational(1);
    return Pmf(std::move(w));
}

Pmf Pmf::uniform(std::size_t atoms) {
    return Pmf(std::vector<Rational>(atoms, Rational(1, static_cast<long>(atoms))));
}

Pmf Pmf::normalized(std::vector<Rational> weights) {
    Rational total;
    for (const auto& x : weights) {
        total += x;
    }
    if (total.sign() <= 0) {
        throw Error(ErrorCode::InvalidArgument, "cannot normalize weights with non-positive total");
    }
    for (auto& x : weights) {
        x /= total;
    }
    return Pmf(std::move(weights));
}

std::string to_string(const Distribution& d) {
    std::string s = "{";
    bool first = true;
    for (const auto& [v, p] : d) {
        if (!first) {
            s += ", ";
        }
        first = false;
        s += v.to_string() + ": " + p.to_string();
    }
    return s + "}";
}

std::string to_string(const Pmf& p, const OutcomeSpace* space) {
    std::string s = "{";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i != 0) {
            s += ", ";
        }
        s += (space != nullptr ? space->atom(i) : std::to_string(i)) + ": " + p[i].to_string();
    }
    return s + "}";
}

// --- CredalSet --------------------------------------------------------------

CredalSet CredalSet::from_vertices(std::vector<Pmf> vertices) {
    if (vertices.empty()) {
        throw Error(ErrorCode::ValidationError, "credal set needs at least one vertex");
    }
    const std::size_t n = vertices.front().size();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].size() != n) {
            throw Error(ErrorCode::ValidationError, "credal vertices over different spaces");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (vertices[i] == vertices[j]) {
                throw Error(ErrorCode::ValidationError, "duplicate credal vertex #" + std::to_string(i));
            }
        }
    }
    return CredalSet(std::move(vertices), std::nullopt);
}

CredalSet CredalSet::from_constraints(const OutcomeSpace& space, std::vector<LinearConstraint> constraints,
                                      std::size_t atom_cap) {
    auto vertices = enumerate_vertices(constraints, space, atom_cap);
    return CredalSet(std::move(vertices), std::move(constraints));
}

// --- vertex enumeration -----------------------------------------------------

bool satisfies(const Pmf& p, const LinearConstraint& c) {
    Rational lhs;
    for (std::size_t i = 0; i < p.size(); ++i) {
        lhs += c.coeffs[i] * p[i];
    }
    switch (c.relation) {
        case Relation::Equal: return lhs == c.rhs;
        case Relation::LessEqual: return lhs <= c.rhs;
        case Relation::GreaterEqual: return lhs >= c.rhs;
    }
    return false;
}

namespace {

struct Row {
    std::vector<Rational> a;
    Rational b;
};

bool row_ok(const Row& r, const std::vector<Rational>& x) {
    Rational lhs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lhs += r.a[i] * x[i];
    }
    return lhs <= r.b;
}

}  // namespace

std::vector<Pmf> enumerate_vertices(std::span<const LinearConstraint> constraints, const OutcomeSpace& space,
                                    std::size_t atom_cap) {
    const std::size_t n = space.size();
    if (n > atom_cap) {
        throw Error(ErrorCode::SizeLimit,
                    std::to_string(n) + " atoms exceed the cap of " + std::to_string(atom_cap));
    }

    std::vector<Row> equalities;
    std::vector<Row> inequalities;  // a.x <= b
    equalities.push_back({std::vector<Rational>(n, Rational(1)), Rational(1)});
    for (const auto& c : constraints) {
        if (c.coeffs.size() != n) {
            throw Error(ErrorCode::ValidationError, "constraint arity does not match the outcome space");
        }
        if (std::all_of(c.coeffs.begin(), c.coeffs.end(), [](const Rational& x) { return x.is_zero(); })) {
            throw Error(ErrorCode::ValidationError, "constraint without a nonzero coefficient");
        }
        switch (c.relation) {
            case Relation::Equal: equalities.push_back({c.coeffs, c.rhs}); break;
            case Relation::LessEqual: inequalities.push_back({c.coeffs, c.rhs}); break;
            case Relation::GreaterEqual: {
                Row r{c.coeffs, -c.rhs};
                for (auto& x : r.a) {
                    x = -x;
                }
                inequalities.push_back(std::move(r));
                break;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Rational> a(n);
        a[i] = Rational(-1);
        inequalities.push_back({std::move(a), Rational(0)});
    }

    detail::Matrix ea;
    detail::Vector eb;
    for (const auto& r : equalities) {
        ea.push_back(r.a);
        eb.push_back(r.b);
    }
    const auto eq = detail::solve(ea, eb);
    if (!eq.consistent) {
        throw Error(ErrorCode::InfeasibleCredalSet, "equality constraints are inconsistent");
    }
    const std::size_t need = n - eq.rank;

    std::vector<std::vector<Rational>> found;
    const std::size_t m = inequalities.size();
    // Choose `need` inequalities to hold with equality, in lexicographic order.
    std::vector<std::size_t> pick(need);
    std::iota(pick.begin(), pick.end(), 0);
    if (need <= m) {
        while (true) {
            detail::Matrix a = ea;
            detail::Vector b = eb;
            for (auto k : pick) {
                a.push_back(inequalities[k].a);
                b.push_back(inequalities[k].b);
            }
            const auto res = detail::solve(std::move(a), std::move(b));
            if (res.unique_solution) {
                const auto& x = *res.unique_solution;
                const bool feasible =
                    std::all_of(inequalities.begin(), inequalities.end(), [&](const Row& r) { return row_ok(r, x); });
                if (feasible) {
                    found.push_back(x);
                }
            }
            // next combination
            std::size_t i = need;
            while (i > 0 && pick[i - 1] == m - need + i - 1) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++pick[i - 1];
            for (std::size_t j = i; j < need; ++j) {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }

    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    if (found.empty()) {
        throw Error(ErrorCode::InfeasibleCredalSet, "no distribution satisfies the constraints");
    }
    // Lexicographic by atom order, largest weight on the earliest atom first.
    std::reverse(found.begin(), found.end());
    std::vector<Pmf> out;
    out.reserve(found.size());
    for (auto& x : found) {
        out.emplace_back(std::move(x));
    }
    return out;
}

// --- distributions of random variables --------------------------------------

Rational probability(const Pmf& p, const Rv& x, const Value& value) {
    Rational total;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (x(i) == value) {
            total += p[i];
        }
    }
    return total;
}

Distribution marginal(const Pmf& p, const Rv& x) {
    Distribution d;
    for (const auto& v : x.range()) {
        d.emplace(v, Rational(0));
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        d[x(i)] += p[i];
    }
    return d;
}

std::vector<Value> support(const Pmf& p, const Rv& x) {
    std::vector<Value> out;
    for (const auto& [v, mass] : marginal(p, x)) {
        if (mass.sign() > 0) {
            out.push_back(v);
        }
    }
    return out;
}

std::optional<std::map<Value, Value>> determines(const Rv& x, const Rv& y, const Pmf* p) {
    std::map<Value, Value> f;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (p != nullptr && (*p)[i].is_zero()) {
            continue;
        }
        auto [it, inserted] = f.emplace(x(i), y(i));
        if (!inserted && !(it->second == y(i))) {
            return std::nullopt;
        }
    }
    return f;
}

Pmf condition(const Pmf& p, const Rv& w, const Value& value) {
    const Rational mass = probability(p, w, value);
    if (mass.is_zero()) {
        throw Error(ErrorCode::ZeroProbabilityConditioning,
                    "P(" + w.name() + " = " + value.to_string() + ") = 0");
    }
    std::vector<Rational> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (w(i) == value) {
            out[i] = p[i] / mass;
        }
    }
    return Pmf(std::move(out));
}

ConditionalTable conditional_table(const Pmf& p, const Rv& u, const Rv& v) {
    ConditionalTable t{v, u, {}, {}};
    const auto u_range = u.range();
    const Rational fill(1, static_cast<long>(u_range.size()));
    for (const auto& vv : v.range()) {
        Distribution row;
        for (const auto& uu : u_range) {
            row.emplace(uu, Rational(0));
        }
        Rational mass;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (v(i) == vv) {
                row[u(i)] += p[i];
                mass += p[i];
            }
        }
        if (mass.is_zero()) {
            for (auto& [_, q] : row) {
                q = fill;
            }
            t.arbitrary_rows.insert(vv);
        } else {
            for (auto& [_, q] : row) {
                q /= mass;
            }
        }
        t.rows.emplace(vv, std::move(row));
    }
    return t;
}

std::vector<Rational> expectation(const Pmf& p, const Rv& x) {
    if (!x.is_numeric()) {
        throw Error(ErrorCode::NonNumericTarget, "expectation of non-numeric '" + x.name() + "'");
    }
    std::vector<Rational> e(x.arity());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].is_zero()) {
            continue;
        }
        const auto& c = x(i).components();
        for (std::size_t k = 0; k < e.size(); ++k) {
            e[k] += p[i] * c[k];
        }
    }
    return e;
}

std::vector<Rational> mean(const Distribution& d) {
    if (d.empty() || !d.begin()->first.is_numeric()) {
        throw Error(ErrorCode::NonNumericTarget, "mean of a distribution over non-numeric values");
    }
    std::vector<Rational> e(d.begin()->first.arity());
    for (const auto& [v, q] : d) {
        const auto& c = v.components();
        for (std::size_t k = 0; k < e.size(); ++k) {
            e[k] += q * c[k];
        }
    }
    return e;
}

std::set<Value> union_support(const CredalSet& credal, const Rv& v) {
    std::set<Value> out;
    for (const auto& p : credal.vertices()) {
        for (auto& x : support(p, v)) {
            out.insert(std::move(x));
        }
    }
    return out;
}

bool essentially_unique(const Pmf& ptilde, const Rv& v, const CredalSet& credal) {
    const auto s = support(ptilde, v);
    const std::set<Value> own(s.begin(), s.end());
    for (const auto& x : union_support(credal, v)) {
        if (own.count(x) == 0) {
            return false;
        }
    }
    return true;
}

}  // namespace safeprob
