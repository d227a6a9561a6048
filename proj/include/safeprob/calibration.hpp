#pragma once

// Calibration of P~(U|V) relative to a credal set, the "ignores" relation,
// and the three-way equivalence between calibration, safety for U|[V],V' and
// validity for U given the predicted distribution.

#include <optional>

#include "safeprob/core.hpp"
#include "safeprob/safety.hpp"

namespace safeprob::calibration {

// V'' = P~(U|V) viewed as a generalized random variable. Its value at z is a
// symbol that spells out the row of P~(U|V) at V(z), so equal rows give equal
// values.
class PredictedDistributionRv {
   public:
    PredictedDistributionRv(const Pmf& ptilde, const Rv& u, const Rv& v);

    [[nodiscard]] const ConditionalTable& base() const { return base_; }
    [[nodiscard]] const Rv& as_rv() const { return rv_; }
    // The row predicted for each value of as_rv().
    [[nodiscard]] const Distribution& prediction(const Value& symbol) const { return predictions_.at(symbol); }

   private:
    ConditionalTable base_;
    Rv rv_;
    std::map<Value, Distribution> predictions_;
};

// Tolerance 0 is the exact definition. A positive tolerance relaxes
// P(U=u | V''=p) = p(u) to |P(U=u | V''=p) - p(u)| <= tolerance.
Verdict check_calibrated_full(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal,
                              const Rational& tolerance = Rational(0));

// Mean version: E_P[U | E~[U|V] = mu] = mu. U must be numeric.
Verdict check_calibrated_mean(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal);

// P~(U | V, V') = P~(U | V') on P~-supported pairs. Requires V to determine V'
// P~-almost surely (MissingDetermination otherwise).
bool ignores(const Pmf& ptilde, const Rv& u, const Rv& v, const Rv& vprime);

// The four equivalent characterizations of "P~(U|V,V') ignores V", each
// computed from its own definition.
struct IgnoreClauses {
    bool conditional_ignores = false;   // P~(U|V,V') = P~(U|V')
    bool rows_match = false;            // P~(U|V=v) = P~(U|V'=f(v)) on supported v
    bool determines_prediction = false; // V' determines V'' P~-a.s.
    bool prediction_suffices = false;   // V' determines V'' and P~(U|V',V'') ignores V'
};
IgnoreClauses ignore_clauses(const Pmf& ptilde, const Rv& u, const Rv& v, const Rv& vprime);

struct Theorem1Result {
    bool calibrated = false;
    bool stratified_marginal = false;  // some V' with V => V' and safety for U|[V],V'
    bool valid_given_prediction = false;
    std::optional<Rv> witness_vprime;
};

// Candidates for V' are tried in the order: constant, V, V''. Throws
// EquivalenceViolation if the three statements disagree.
Theorem1Result theorem1_check(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal);

}  // namespace safeprob::calibration
