#pragma once

// Symmetric losses, Bayes acts under P~(U|V=v), and the check that the
// P~-Bayes policy incurs exactly the loss P~ predicts under every credal vertex.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safeprob/core.hpp"
#include "safeprob/safety.hpp"

namespace safeprob::decisions {

enum class LossKind { ZeroOne, Brier, Log, Custom };

// Rational or +infinity.
struct ExtendedRational {
    bool infinite = false;
    Rational finite;

    static ExtendedRational infinity() { return {true, Rational(0)}; }
    friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
        return a.infinite == b.infinite && (a.infinite || a.finite == b.finite);
    }
    [[nodiscard]] std::string to_string() const { return infinite ? "inf" : finite.to_string(); }
};

// An action is a pmf over range(U): a point mass for plain 0/1 loss, any pmf
// for the scoring rules and for randomized 0/1 loss.
struct Action {
    Distribution mass;
    bool tie = false;                      // several Bayes acts; the lowest was taken
    std::optional<std::size_t> table_index;  // custom losses only
};

class LossFunction {
   public:
    static LossFunction zero_one(bool randomized = false);
    static LossFunction brier();
    static LossFunction log();
    // loss[a][k] is the loss of action a when U takes the k-th value of
    // `outcomes`. Rejected unless invariant under every permutation of the
    // outcomes (checked for at most kSymmetryCheckCap outcomes).
    static LossFunction custom(std::vector<Value> outcomes, std::vector<Distribution> actions,
                               std::vector<std::vector<ExtendedRational>> loss);

    static constexpr std::size_t kSymmetryCheckCap = 6;

    [[nodiscard]] LossKind kind() const { return kind_; }
    [[nodiscard]] bool randomized() const { return randomized_; }
    [[nodiscard]] std::string name() const;
    [[nodiscard]] const std::vector<Distribution>& actions() const { return actions_; }

    // Exact loss; not available for Log.
    [[nodiscard]] ExtendedRational exact(const Value& u, const Action& a) const;
    // Floating loss, +inf where infinite.
    [[nodiscard]] double approx(const Value& u, const Action& a) const;

   private:
    LossKind kind_ = LossKind::ZeroOne;
    bool randomized_ = false;
    std::vector<Value> outcomes_;
    std::vector<Distribution> actions_;
    std::vector<std::vector<ExtendedRational>> table_;
};

Action bayes_act(const LossFunction& loss, const Distribution& belief);

struct DecisionRow {
    Value v;
    Action act;
    Number believed;  // E~[L(U, a_v) | V=v]
};

struct DecisionReport {
    Verdict verdict;
    std::vector<DecisionRow> rows;  // one per v in supp_P~(V)
    std::vector<Number> actual;     // E_P[L(U, a_V)], one per credal vertex
    bool ties = false;
};

inline constexpr double kLogLossTolerance = 1e-12;

// Compares, for each credal vertex P and each v in supp_P~(V), the actual
// expected loss of the P~-Bayes policy under P with the loss P~ predicts at v.
// Exact except for log loss. InfiniteLoss if log loss is infinite under some
// vertex.
DecisionReport check_decision_safety(const Pmf& ptilde, const Rv& u, const Rv& v, const LossFunction& loss,
                                     const CredalSet& credal);

struct GambleResult {
    double actual_closed_form = 0;
    double actual_mc = 0;
    double believed_mc = 0;
    bool unsafe_gap = false;  // actual > 0 > believed
};

// Normal location model with n observations and true mean theta_bar < 0. The
// bet is accepted iff the estimate is positive; it loses 1 if theta < 0 and
// wins 1 otherwise.
GambleResult gamble_demo(double theta_bar, int n, std::uint64_t samples, std::uint64_t seed);

}  // namespace safeprob::decisions
