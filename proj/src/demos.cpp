#include "safeprob/demos.hpp"

#include <cmath>

#include "safeprob/calibration.hpp"
#include "safeprob/decisions.hpp"
#include "safeprob/pivots.hpp"
#include "safeprob/safety.hpp"

namespace safeprob::demos {

namespace {

Value num(long x) { return Value::numeric(Rational(x)); }

LinearConstraint marginal_constraint(const Rv& u, const Value& value, const Rational& rhs) {
    LinearConstraint c{std::vector<Rational>(u.size()), Relation::Equal, rhs};
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u(i) == value) {
            c.coeffs[i] = Rational(1);
        }
    }
    return c;
}

cli::Json verdict(const Verdict& v, const Setup& s) { return cli::verdict_json(v, &s.space); }

}  // namespace

Setup dilation(const Rational& p) {
    if (p.sign() < 0 || p > Rational(1)) {
        throw Error(ErrorCode::InvalidArgument, "probability outside [0,1]");
    }
    OutcomeSpace space({"(1,0)", "(1,1)", "(0,0)", "(0,1)"});
    Rv u("U", {num(1), num(1), num(0), num(0)});
    Rv v("V", {num(0), num(1), num(0), num(1)});
    auto credal = CredalSet::from_constraints(space, {marginal_constraint(u, num(1), p)});
    const Rational half(1, 2);
    Pmf ptilde({p * half, p * half, (Rational(1) - p) * half, (Rational(1) - p) * half});
    return {std::move(space), std::move(u), std::move(v), std::move(credal), std::move(ptilde)};
}

Setup dilation_extended(const Rational& p1, const Rational& p2) {
    const Rational p0 = Rational(1) - p1 - p2;
    if (p0.sign() < 0 || p1.sign() < 0 || p2.sign() < 0) {
        throw Error(ErrorCode::InvalidArgument, "row probabilities must be nonnegative and sum to at most 1");
    }
    OutcomeSpace space({"(0,0)", "(0,1)", "(1,0)", "(1,1)", "(2,0)", "(2,1)"});
    Rv u("U", {num(0), num(0), num(1), num(1), num(2), num(2)});
    Rv v("V", {num(0), num(1), num(0), num(1), num(0), num(1)});
    auto credal = CredalSet::from_constraints(space, {marginal_constraint(u, num(1), p1)});
    const Rational half(1, 2);
    Pmf ptilde({p0 * half, p0 * half, p1 * half, p1 * half, p2 * half, p2 * half});
    return {std::move(space), std::move(u), std::move(v), std::move(credal), std::move(ptilde)};
}

updates::EventScenario monty_events(const MontyParams& params) {
    if (params.prior.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "Monty Hall needs a prior over three doors");
    }
    return {{num(1), num(2), num(3)}, params.prior, {{num(1), num(2)}, {num(1), num(3)}}};
}

Setup monty(const MontyParams& params) {
    if (params.coin.sign() < 0 || params.coin > Rational(1)) {
        throw Error(ErrorCode::InvalidArgument, "host coin outside [0,1]");
    }
    auto built = updates::build_event_scenario(monty_events(params));
    // Atoms: (1,{1,2}), (1,{1,3}), (2,{1,2}), (3,{1,3}).
    const auto& pr = params.prior;
    Pmf ptilde({pr[0] * params.coin, pr[0] * (Rational(1) - params.coin), pr[1], pr[2]});
    return {std::move(built.space), std::move(built.u), std::move(built.v), std::move(built.credal), std::move(ptilde)};
}

DemoResult dilation_demo(const Rational& p) {
    DemoResult out;
    const auto s = dilation(p);
    const auto report = safety::hierarchy_report(s.u, s.v, s.ptilde, s.credal);
    const auto thm1 = calibration::theorem1_check(s.u, s.v, s.ptilde, s.credal);

    const auto ext = dilation_extended(p);
    const Rv is_one = Rv::indicator("1{U=1}", ext.u, num(1));
    const auto indicator_unbiased = safety::check_safety(
        {is_one, safety::LeftMode::Average, ext.v, safety::RightMode::Angle, std::nullopt}, ext.ptilde, ext.credal);
    const auto mean_unbiased = safety::check_safety(
        {ext.u, safety::LeftMode::Average, ext.v, safety::RightMode::Angle, std::nullopt}, ext.ptilde, ext.credal);

    cli::Json j;
    j["demo"] = "dilation";
    j["p"] = p.to_string();
    cli::Json vs = cli::Json::array();
    for (const auto& vx : s.credal.vertices()) {
        vs.push_back(cli::pmf_json(vx, &s.space));
    }
    j["credal_vertices"] = std::move(vs);
    j["hierarchy"] = cli::hierarchy_json(report, &s.space);
    j["theorem1"] = {{"calibrated", thm1.calibrated},
                     {"safe_marginal_given_vprime", thm1.stratified_marginal},
                     {"valid_given_prediction", thm1.valid_given_prediction},
                     {"witness_vprime", thm1.witness_vprime ? cli::Json(thm1.witness_vprime->name()) : cli::Json(nullptr)}};
    j["extended"] = {{"<1{U=1}>|<V>", verdict(indicator_unbiased, ext)}, {"<U>|<V>", verdict(mean_unbiased, ext)}};

    const auto holds = [&](const char* n) { return report.at(n).holds; };
    out.assertions_hold = holds("U|[V]") && holds("U|<V>") && holds("<U>|<V>") && holds("<U>|[[V]]") &&
                          holds("calibrated") && !holds("U|V") && !holds("<U>|V") && indicator_unbiased.holds &&
                          !mean_unbiased.holds && report.diagnostics.empty();
    j["assertions_hold"] = out.assertions_hold;
    out.report = std::move(j);
    return out;
}

DemoResult monty_demo(const MontyParams& params) {
    DemoResult out;
    const auto ev = monty_events(params);
    auto built = updates::build_event_scenario(ev);
    const Setup s = monty(params);

    // Naive conditioning, completed to a joint.
    const auto naive_joint = updates::check_compatibility(built.naive, built.space);
    cli::Json naive;
    naive["rows"] = cli::Json::object();
    for (const auto& [vv, row] : built.naive.rows) {
        naive["rows"][vv.to_string()] = cli::distribution_json(row);
    }
    const auto valid = safety::check_safety({s.u, safety::LeftMode::Full, s.v, safety::RightMode::Plain, std::nullopt},
                                            *naive_joint, s.credal);
    const auto dist_unbiased = updates::prop3_gate(built.naive, built.space, s.credal);
    naive["U|V"] = verdict(valid, s);
    naive["U|<V>"] = verdict(dist_unbiased, s);
    const auto partition = updates::partition_check(ev);
    naive["partition"] = {{"is_partition", partition.is_partition},
                          {"naive_valid", partition.prop4_verdict.holds}};

    updates::EventScenario control = ev;
    control.observables = {{num(1)}, {num(2), num(3)}};
    const auto control_check = updates::partition_check(control);

    // The host's coin.
    const Rv uprime = Rv::indicator("U'", s.u, num(1));
    const auto spec = pivots::PivotSpec::from_rv(s.u, s.v, uprime);
    const auto pivot = pivots::check_pivot(spec, s.u, s.v, s.credal);
    std::optional<Verdict> pivotal;
    cli::Json coin;
    coin["coin"] = params.coin.to_string();
    coin["rows"] = cli::Json::object();
    const auto table = conditional_table(s.ptilde, s.u, s.v);
    for (const auto& [vv, row] : table.rows) {
        coin["rows"][vv.to_string()] = cli::distribution_json(row);
    }
    coin["pivot"] = {{"is_pivot", pivot.is_pivot}, {"is_simple", pivot.is_simple},
                     {"failure", pivot.failure ? cli::Json(*pivot.failure) : cli::Json(nullptr)}};
    if (pivot.is_pivot) {
        pivotal = pivots::check_pivotal_safety(s.ptilde, s.u, s.v, spec, s.credal);
        coin["pivotal_safety"] = verdict(*pivotal, s);
    } else {
        coin["pivotal_safety"] = "not applicable: not a pivot";
    }

    bool decisions_hold = true;
    cli::Json losses = cli::Json::object();
    for (const auto& loss : {decisions::LossFunction::zero_one(), decisions::LossFunction::brier()}) {
        const auto d = decisions::check_decision_safety(s.ptilde, s.u, s.v, loss, s.credal);
        cli::Json lj;
        lj["believed"] = cli::Json::object();
        for (const auto& row : d.rows) {
            lj["believed"][row.v.to_string()] = cli::number_json(row.believed);
        }
        lj["actual"] = cli::Json::array();
        for (const auto& a : d.actual) {
            lj["actual"].push_back(cli::number_json(a));
        }
        lj["verdict"] = verdict(d.verdict, s);
        losses[loss.name()] = std::move(lj);
        decisions_hold = decisions_hold && d.verdict.holds;
    }
    coin["decision_safety"] = std::move(losses);

    cli::Json j;
    j["demo"] = "monty-hall";
    j["prior"] = cli::Json::array();
    for (const auto& q : params.prior) {
        j["prior"].push_back(q.to_string());
    }
    j["atoms"] = s.space.atoms();
    j["credal_vertices"] = cli::Json::array();
    for (const auto& vx : s.credal.vertices()) {
        j["credal_vertices"].push_back(cli::pmf_json(vx, &s.space));
    }
    j["naive"] = std::move(naive);
    j["partition_control"] = {{"is_partition", control_check.is_partition},
                              {"naive_valid", control_check.prop4_verdict.holds}};
    j["host_coin"] = std::move(coin);

    out.assertions_hold = !valid.holds && !dist_unbiased.holds && !partition.is_partition &&
                          !partition.prop4_verdict.holds && control_check.is_partition &&
                          control_check.prop4_verdict.holds && pivot.is_simple && pivotal && pivotal->holds &&
                          decisions_hold;
    j["assertions_hold"] = out.assertions_hold;
    out.report = std::move(j);
    return out;
}

DemoResult gamble_demo(double theta_bar, int n, std::uint64_t samples, std::uint64_t seed) {
    DemoResult out;
    const auto g = decisions::gamble_demo(theta_bar, n, samples, seed);
    cli::Json j;
    j["demo"] = "gamble";
    j["theta_bar"] = theta_bar;
    j["n"] = n;
    j["samples"] = samples;
    j["seed"] = seed;
    j["actual_expected_loss_closed_form"] = g.actual_closed_form;
    j["actual_expected_loss_monte_carlo"] = g.actual_mc;
    j["believed_expected_loss_monte_carlo"] = g.believed_mc;
    j["unsafe_gap"] = g.unsafe_gap;
    out.assertions_hold = g.unsafe_gap && std::abs(g.actual_closed_form - g.actual_mc) <= kGambleTolerance;
    j["assertions_hold"] = out.assertions_hold;
    out.report = std::move(j);
    return out;
}

}  // namespace safeprob::demos
