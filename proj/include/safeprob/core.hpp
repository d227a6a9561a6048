#pragma once

// Exact finite probability substrate: outcome spaces, random variables,
// distributions, credal polytopes and conditioning.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "safeprob/error.hpp"
#include "safeprob/rational.hpp"

namespace safeprob {

inline constexpr std::size_t kDefaultAtomCap = 16;

class OutcomeSpace {
   public:
    explicit OutcomeSpace(std::vector<std::string> atoms);

    [[nodiscard]] std::size_t size() const { return atoms_.size(); }
    [[nodiscard]] const std::string& atom(std::size_t i) const { return atoms_.at(i); }
    [[nodiscard]] const std::vector<std::string>& atoms() const { return atoms_; }
    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& atom) const;

    friend bool operator==(const OutcomeSpace& a, const OutcomeSpace& b) { return a.atoms_ == b.atoms_; }

   private:
    std::vector<std::string> atoms_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Value taken by a random variable: a numeric tuple (arity >= 1) or an opaque
// symbol. Numeric values order before symbols; each kind orders lexicographically.
class Value {
   public:
    Value() : v_(std::vector<Rational>{Rational(0)}) {}
    static Value numeric(Rational x) { return Value(std::vector<Rational>{std::move(x)}); }
    static Value numeric(std::vector<Rational> xs);
    static Value symbol(std::string s) { return Value(std::move(s)); }

    [[nodiscard]] bool is_numeric() const { return v_.index() == 0; }
    [[nodiscard]] std::size_t arity() const { return is_numeric() ? components().size() : 0; }
    [[nodiscard]] const std::vector<Rational>& components() const { return std::get<0>(v_); }
    [[nodiscard]] const Rational& scalar() const;
    [[nodiscard]] const std::string& symbol_name() const { return std::get<1>(v_); }

    // "3", "1/2", "(1,2)" or the bare symbol.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
    friend bool operator<(const Value& a, const Value& b);

   private:
    explicit Value(std::vector<Rational> xs) : v_(std::move(xs)) {}
    explicit Value(std::string s) : v_(std::move(s)) {}
    std::variant<std::vector<Rational>, std::string> v_;
};

// Labeling of atoms; total over the outcome space it was built for.
class Rv {
   public:
    Rv(std::string name, std::vector<Value> table);

    static Rv constant(std::string name, std::size_t atoms, Value value = Value::numeric(Rational(0)));
    // Pairs two labelings; the joint value is a symbol encoding both sides.
    static Rv joint(const Rv& a, const Rv& b);
    // Indicator of the event {X = x}.
    static Rv indicator(std::string name, const Rv& x, const Value& value);
    // f applied pointwise; f must be total on range(X).
    template <class F>
    static Rv map(std::string name, const Rv& x, F&& f) {
        std::vector<Value> out;
        out.reserve(x.size());
        for (const auto& v : x.table()) {
            out.push_back(f(v));
        }
        return Rv(std::move(name), std::move(out));
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] std::size_t size() const { return table_.size(); }
    [[nodiscard]] const Value& operator()(std::size_t atom) const { return table_[atom]; }
    [[nodiscard]] const std::vector<Value>& table() const { return table_; }
    [[nodiscard]] bool is_numeric() const { return table_.front().is_numeric(); }
    [[nodiscard]] std::size_t arity() const { return table_.front().arity(); }

    // Sorted distinct values.
    [[nodiscard]] std::vector<Value> range() const;
    // Values of *this on atoms where `given` equals `g`.
    [[nodiscard]] std::vector<Value> range_given(const Rv& given, const Value& g) const;

   private:
    std::string name_;
    std::vector<Value> table_;
};

// Joint distribution over the atoms of one outcome space.
class Pmf {
   public:
    explicit Pmf(std::vector<Rational> weights);

    static Pmf point_mass(std::size_t atoms, std::size_t at);
    static Pmf uniform(std::size_t atoms);
    // Normalizes nonnegative weights with a positive total.
    static Pmf normalized(std::vector<Rational> weights);

    [[nodiscard]] std::size_t size() const { return w_.size(); }
    [[nodiscard]] const Rational& operator[](std::size_t i) const { return w_[i]; }
    [[nodiscard]] const std::vector<Rational>& weights() const { return w_; }

    friend bool operator==(const Pmf& a, const Pmf& b) { return a.w_ == b.w_; }
    friend bool operator<(const Pmf& a, const Pmf& b) { return a.w_ < b.w_; }

   private:
    std::vector<Rational> w_;
};

// Distribution of a random variable: value -> probability. By convention every
// value of the relevant range is present, zeros included.
using Distribution = std::map<Value, Rational>;

std::string to_string(const Distribution& d);
std::string to_string(const Pmf& p, const OutcomeSpace* space = nullptr);

enum class Relation { Equal, LessEqual, GreaterEqual };

struct LinearConstraint {
    std::vector<Rational> coeffs;  // one per atom
    Relation relation = Relation::Equal;
    Rational rhs;
};

// A set of candidate distributions, stored by its vertices. A constraint
// description is converted to vertices once, at construction.
class CredalSet {
   public:
    static CredalSet from_vertices(std::vector<Pmf> vertices);
    static CredalSet from_constraints(const OutcomeSpace& space, std::vector<LinearConstraint> constraints,
                                      std::size_t atom_cap = kDefaultAtomCap);
    static CredalSet singleton(Pmf p) { return from_vertices({std::move(p)}); }

    [[nodiscard]] const std::vector<Pmf>& vertices() const { return vertices_; }
    [[nodiscard]] bool is_polytope() const { return constraints_.has_value(); }
    [[nodiscard]] const std::optional<std::vector<LinearConstraint>>& constraints() const { return constraints_; }
    [[nodiscard]] std::size_t atoms() const { return vertices_.front().size(); }

   private:
    CredalSet(std::vector<Pmf> v, std::optional<std::vector<LinearConstraint>> c)
        : vertices_(std::move(v)), constraints_(std::move(c)) {}
    std::vector<Pmf> vertices_;
    std::optional<std::vector<LinearConstraint>> constraints_;
};

// P(U | V) as a table of rows indexed by the value of V. Rows for values of V
// with zero probability are filled uniformly over range(U) and flagged.
struct ConditionalTable {
    Rv given;
    Rv target;
    std::map<Value, Distribution> rows;
    std::set<Value> arbitrary_rows;

    [[nodiscard]] const Distribution& row(const Value& v) const { return rows.at(v); }
    [[nodiscard]] bool is_arbitrary(const Value& v) const { return arbitrary_rows.count(v) != 0; }
};

// --- operations -----------------------------------------------------------

// Extreme points of {P : simplex and constraints}, deduplicated and sorted
// lexicographically by weight vector.
std::vector<Pmf> enumerate_vertices(std::span<const LinearConstraint> constraints, const OutcomeSpace& space,
                                    std::size_t atom_cap = kDefaultAtomCap);

[[nodiscard]] bool satisfies(const Pmf& p, const LinearConstraint& c);

Rational probability(const Pmf& p, const Rv& x, const Value& value);
Distribution marginal(const Pmf& p, const Rv& x);
std::vector<Value> support(const Pmf& p, const Rv& x);

// Function f with Y = f(X) on every atom (or on P-almost every atom).
std::optional<std::map<Value, Value>> determines(const Rv& x, const Rv& y, const Pmf* p = nullptr);

Pmf condition(const Pmf& p, const Rv& w, const Value& value);
ConditionalTable conditional_table(const Pmf& p, const Rv& u, const Rv& v);

// E_P[X] componentwise; X must be numeric.
std::vector<Rational> expectation(const Pmf& p, const Rv& x);
// E[X | row] for a distribution over numeric values.
std::vector<Rational> mean(const Distribution& d);

// Union over credal vertices of supp_P(V).
std::set<Value> union_support(const CredalSet& credal, const Rv& v);
bool essentially_unique(const Pmf& ptilde, const Rv& v, const CredalSet& credal);

}  // namespace safeprob
