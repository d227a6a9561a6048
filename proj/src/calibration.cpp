#include "safeprob/calibration.hpp"

namespace safeprob::calibration {

namespace {

void require_unique(const Pmf& ptilde, const Rv& v, const CredalSet& credal) {
    if (ptilde.size() != v.size() || credal.atoms() != v.size()) {
        throw Error(ErrorCode::InvalidArgument, "pragmatic distribution, credal set and variables disagree on atoms");
    }
    if (!essentially_unique(ptilde, v, credal)) {
        throw Error(ErrorCode::NotEssentiallyUnique,
                    "some credal vertex supports a value of " + v.name() + " that P~ gives zero probability");
    }
}

// Values of `x` that some credal vertex supports.
std::set<Value> forecast_values(const CredalSet& credal, const Rv& x) { return union_support(credal, x); }

// P~(U | X=x) on the P~-supported values of X, as a map.
std::map<Value, Distribution> supported_rows(const Pmf& ptilde, const Rv& u, const Rv& x) {
    const auto table = conditional_table(ptilde, u, x);
    std::map<Value, Distribution> out;
    for (const auto& xx : support(ptilde, x)) {
        out.emplace(xx, table.row(xx));
    }
    return out;
}

}  // namespace

PredictedDistributionRv::PredictedDistributionRv(const Pmf& ptilde, const Rv& u, const Rv& v)
    : base_(conditional_table(ptilde, u, v)),
      rv_(Rv::map("P~(" + u.name() + "|" + v.name() + ")", v,
                  [this](const Value& vv) { return Value::symbol(to_string(base_.row(vv))); })) {
    for (const auto& [vv, row] : base_.rows) {
        predictions_.emplace(Value::symbol(to_string(row)), row);
    }
}

Verdict check_calibrated_full(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal,
                              const Rational& tolerance) {
    require_unique(ptilde, v, credal);
    if (tolerance.sign() < 0) {
        throw Error(ErrorCode::InvalidArgument, "calibration tolerance must be nonnegative");
    }
    const PredictedDistributionRv vpp(ptilde, u, v);
    const Rv& forecast = vpp.as_rv();
    const auto issued = forecast_values(credal, forecast);

    Verdict verdict;
    for (const auto& vv : vpp.base().arbitrary_rows) {
        verdict.notes.push_back("row " + v.name() + "=" + vv.to_string() + " has zero P~-probability; filled uniformly");
    }
    const auto& vertices = credal.vertices();
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const Pmf& p = vertices[k];
        for (const auto& f : issued) {
            const Distribution& row = vpp.prediction(f);
            const Rational mass = probability(p, forecast, f);
            for (const auto& [uu, pu] : row) {
                Rational joint;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    if (forecast(i) == f && u(i) == uu) {
                        joint += p[i];
                    }
                }
                const Rational rhs = pu * mass;
                if (abs(joint - rhs) > tolerance * mass) {
                    verdict.holds = false;
                    verdict.counterexample = Counterexample{k, p, std::nullopt, std::nullopt, uu, std::nullopt, joint, rhs};
                    verdict.notes.push_back("P(U=u, P~(U|V)=p) differs from p(u) P(P~(U|V)=p) for p = " + f.symbol_name());
                    return verdict;
                }
            }
        }
    }
    return verdict;
}

Verdict check_calibrated_mean(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal) {
    if (!u.is_numeric()) {
        throw Error(ErrorCode::NonNumericTarget, "mean calibration on non-numeric '" + u.name() + "'");
    }
    require_unique(ptilde, v, credal);
    const auto table = conditional_table(ptilde, u, v);
    const Rv predicted = Rv::map("E~[" + u.name() + "|" + v.name() + "]", v,
                                 [&](const Value& vv) { return Value::numeric(mean(table.row(vv))); });
    const auto issued = forecast_values(credal, predicted);

    Verdict verdict;
    const auto& vertices = credal.vertices();
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const Pmf& p = vertices[k];
        for (const auto& mu : issued) {
            const Rational mass = probability(p, predicted, mu);
            std::vector<Rational> moment(u.arity());
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (predicted(i) == mu) {
                    for (std::size_t c = 0; c < moment.size(); ++c) {
                        moment[c] += p[i] * u(i).components()[c];
                    }
                }
            }
            for (std::size_t c = 0; c < moment.size(); ++c) {
                const Rational rhs = mu.components()[c] * mass;
                if (moment[c] != rhs) {
                    verdict.holds = false;
                    verdict.counterexample = Counterexample{k, p, std::nullopt, std::nullopt, std::nullopt, c, moment[c], rhs};
                    verdict.notes.push_back("E_P[U 1{E~[U|V]=mu}] differs from mu P(E~[U|V]=mu) for mu = " + mu.to_string());
                    return verdict;
                }
            }
        }
    }
    return verdict;
}

bool ignores(const Pmf& ptilde, const Rv& u, const Rv& v, const Rv& vprime) {
    if (!determines(v, vprime, &ptilde)) {
        throw Error(ErrorCode::MissingDetermination, v.name() + " does not determine " + vprime.name() + " P~-a.s.");
    }
    const Rv both = Rv::joint(v, vprime);
    const auto fine = supported_rows(ptilde, u, both);
    const auto coarse = supported_rows(ptilde, u, vprime);
    for (std::size_t i = 0; i < ptilde.size(); ++i) {
        if (ptilde[i].is_zero()) {
            continue;
        }
        if (fine.at(both(i)) != coarse.at(vprime(i))) {
            return false;
        }
    }
    return true;
}

IgnoreClauses ignore_clauses(const Pmf& ptilde, const Rv& u, const Rv& v, const Rv& vprime) {
    const auto f = determines(v, vprime, &ptilde);
    if (!f) {
        throw Error(ErrorCode::MissingDetermination, v.name() + " does not determine " + vprime.name() + " P~-a.s.");
    }
    IgnoreClauses out;
    out.conditional_ignores = ignores(ptilde, u, v, vprime);

    const auto rows_v = supported_rows(ptilde, u, v);
    const auto rows_vp = supported_rows(ptilde, u, vprime);
    out.rows_match = true;
    for (const auto& [vv, row] : rows_v) {
        if (row != rows_vp.at(f->at(vv))) {
            out.rows_match = false;
            break;
        }
    }

    const PredictedDistributionRv vpp(ptilde, u, v);
    out.determines_prediction = determines(vprime, vpp.as_rv(), &ptilde).has_value();

    if (out.determines_prediction) {
        const Rv pair = Rv::joint(vprime, vpp.as_rv());
        const auto fine = supported_rows(ptilde, u, pair);
        const auto coarse = supported_rows(ptilde, u, vpp.as_rv());
        out.prediction_suffices = true;
        for (std::size_t i = 0; i < ptilde.size(); ++i) {
            if (!ptilde[i].is_zero() && fine.at(pair(i)) != coarse.at(vpp.as_rv()(i))) {
                out.prediction_suffices = false;
                break;
            }
        }
    }
    return out;
}

Theorem1Result theorem1_check(const Rv& u, const Rv& v, const Pmf& ptilde, const CredalSet& credal) {
    Theorem1Result out;
    out.calibrated = check_calibrated_full(u, v, ptilde, credal).holds;

    const PredictedDistributionRv vpp(ptilde, u, v);
    out.valid_given_prediction =
        safety::check_safety({u, safety::LeftMode::Full, vpp.as_rv(), safety::RightMode::Plain, std::nullopt}, ptilde,
                             credal)
            .holds;

    const Rv candidates[] = {Rv::constant("0", v.size()), v, vpp.as_rv()};
    for (const auto& vprime : candidates) {
        if (!determines(v, vprime, &ptilde)) {
            continue;
        }
        const auto verdict =
            safety::check_safety({u, safety::LeftMode::Full, v, safety::RightMode::Square, vprime}, ptilde, credal);
        if (verdict.holds) {
            out.stratified_marginal = true;
            out.witness_vprime = vprime;
            break;
        }
    }

    if (out.calibrated != out.valid_given_prediction || out.calibrated != out.stratified_marginal) {
        throw Error(ErrorCode::EquivalenceViolation,
                    std::string("calibrated=") + (out.calibrated ? "true" : "false") +
                        ", safe for U|[V],V'=" + (out.stratified_marginal ? "true" : "false") +
                        ", valid given V''=" + (out.valid_given_prediction ? "true" : "false"));
    }
    return out;
}

}  // namespace safeprob::calibration
