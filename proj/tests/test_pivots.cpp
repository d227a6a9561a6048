#include <gtest/gtest.h>

#include <algorithm>

#include "safeprob/decisions.hpp"
#include "safeprob/demos.hpp"
#include "safeprob/pivots.hpp"
#include "support/generators.hpp"

namespace sp = safeprob;
using sp::Pmf;
using sp::Rational;
using sp::Rv;
using sp::Value;
namespace pv = sp::pivots;

namespace {

Value num(long x) { return Value::numeric(Rational(x)); }

sp::demos::Setup helpful_host() {
    sp::demos::MontyParams params;
    params.coin = Rational(1);  // always opens door 3 when the car is behind door 1
    return sp::demos::monty(params);
}

sp::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const sp::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return sp::ErrorCode::InvalidArgument;
}

}  // namespace

TEST(CheckPivot, MontyHostCoinIsASimplePivot) {
    const auto m = sp::demos::monty();
    const Rv car1 = Rv::indicator("U'", m.u, num(1));
    const auto verdict = pv::check_pivot(pv::PivotSpec::from_rv(m.u, m.v, car1), m.u, m.v, m.credal);
    EXPECT_TRUE(verdict.is_pivot);
    EXPECT_TRUE(verdict.is_simple);
    EXPECT_FALSE(verdict.failure);
}

TEST(CheckPivot, CredalDisagreementBreaksClauseThree) {
    const auto s = sp::demos::dilation_extended();
    const auto verdict = pv::check_pivot(pv::PivotSpec::from_rv(s.u, s.v, s.u), s.u, s.v, s.credal);
    EXPECT_FALSE(verdict.is_pivot);
    ASSERT_TRUE(verdict.failure);
}

TEST(CheckPivot, NonInjectiveSectionBreaksClauseTwo) {
    const auto s = sp::demos::dilation_extended();
    const Rv one = Rv::indicator("1{U=1}", s.u, num(1));
    const auto verdict = pv::check_pivot(pv::PivotSpec::from_rv(s.u, s.v, one), s.u, s.v, s.credal);
    EXPECT_FALSE(verdict.is_pivot);
    EXPECT_NE(verdict.failure->find("injective"), std::string::npos);
}

TEST(CheckPivot, ConflictingTableIsNotAFunction) {
    const Rv u("U", {num(0), num(0)});
    const Rv v("V", {num(0), num(0)});
    const Rv up("U'", {num(0), num(1)});
    const auto spec = pv::PivotSpec::from_rv(u, v, up);
    EXPECT_EQ(spec.conflicts().size(), 1U);
    EXPECT_FALSE(pv::check_pivot(spec, u, v, sp::CredalSet::singleton(Pmf::uniform(2))).is_pivot);
}

TEST(PivotalSafety, FairCoinHoldsHelpfulHostFails) {
    const auto m = sp::demos::monty();
    const Rv car1 = Rv::indicator("U'", m.u, num(1));
    const auto spec = pv::PivotSpec::from_rv(m.u, m.v, car1);
    EXPECT_TRUE(pv::check_pivotal_safety(m.ptilde, m.u, m.v, spec, m.credal).holds);

    const auto h = helpful_host();
    const auto rows = sp::conditional_table(h.ptilde, car1, h.v);
    EXPECT_EQ(rows.row(Value::symbol("{1,2}")).at(num(1)), Rational(1, 2));
    EXPECT_EQ(rows.row(Value::symbol("{1,3}")).at(num(1)), Rational(0));
    EXPECT_FALSE(pv::check_pivotal_safety(h.ptilde, h.u, h.v, spec, h.credal).holds);
}

TEST(PivotalSafety, ConstantConditionerComparesMarginals) {
    const Rv u("U", {num(0), num(1), num(2)});
    const Rv v = Rv::constant("V", 3);
    const auto spec = pv::PivotSpec::from_rv(u, v, u);
    const Pmf p({Rational(1, 2), Rational(1, 3), Rational(1, 6)});
    const Pmf q({Rational(1, 3), Rational(1, 2), Rational(1, 6)});
    EXPECT_TRUE(pv::check_pivotal_safety(p, u, v, spec, sp::CredalSet::singleton(p)).holds);
    EXPECT_FALSE(pv::check_pivotal_safety(q, u, v, spec, sp::CredalSet::singleton(p)).holds);
}

TEST(PivotalSafety, Preconditions) {
    const auto m = sp::demos::monty();
    const Rv car1 = Rv::indicator("U'", m.u, num(1));
    const auto spec = pv::PivotSpec::from_rv(m.u, m.v, car1);
    const Pmf one_sided({Rational(1, 3), 0, Rational(2, 3), 0});
    EXPECT_EQ(code_of([&] { (void)pv::check_pivotal_safety(one_sided, m.u, m.v, spec, m.credal); }),
              sp::ErrorCode::NotFullSupport);
    const auto bad = pv::PivotSpec::from_rv(m.u, m.v, Rv::constant("C", 4));
    EXPECT_EQ(code_of([&] { (void)pv::check_pivotal_safety(m.ptilde, m.u, m.v, bad, m.credal); }),
              sp::ErrorCode::NotAPivot);
}

TEST(PivotalSafety, StratifiedByAFunctionOfV) {
    const auto m = sp::demos::monty();
    const Rv car1 = Rv::indicator("U'", m.u, num(1));
    const auto spec = pv::PivotSpec::from_rv(m.u, m.v, car1);
    // W = V: each stratum has a single observation; the law of U' given V differs
    // across the two vertices, so U' is no pivot within a stratum.
    EXPECT_EQ(code_of([&] { (void)pv::check_pivotal_safety(m.ptilde, m.u, m.v, spec, m.credal, m.v); }),
              sp::ErrorCode::NotAPivot);
    EXPECT_TRUE(pv::check_pivotal_safety(m.ptilde, m.u, m.v, spec, m.credal, Rv::constant("W", 4)).holds);
}

TEST(CanonicalPivot, Examples) {
    const auto m = sp::demos::monty();
    const auto spec = pv::canonical_pivot(m.ptilde, m.u, m.v);
    EXPECT_EQ(*spec.at(num(1), Value::symbol("{1,2}")), Value::numeric(Rational(1, 3)));
    EXPECT_EQ(*spec.at(num(2), Value::symbol("{1,2}")), Value::numeric(Rational(2, 3)));
    EXPECT_EQ(*spec.at(num(3), Value::symbol("{1,3}")), Value::numeric(Rational(2, 3)));

    const auto naive = Pmf::uniform(4);
    EXPECT_EQ(code_of([&] { (void)pv::canonical_pivot(naive, m.u, m.v); }), sp::ErrorCode::UniquenessViolated);

    const Rv u("U", {num(0), num(1)});
    const Rv v("V", {num(0), num(1)});
    const auto point = pv::canonical_pivot(Pmf({Rational(1, 2), Rational(1, 2)}), u, v);
    EXPECT_EQ(point.realize(u, v).range(), std::vector<Value>{Value::numeric(Rational(1))});
}

TEST(CanonicalPivot, SatisfiesStructuralClauses) {
    sp::testing::Gen g(81);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = sp::testing::pivot_instance(g, 8);
        if (!inst) {
            continue;
        }
        ++checked;
        const auto spec = pv::canonical_pivot(inst->ptilde, inst->u, inst->v);
        EXPECT_TRUE(spec.conflicts().empty());
        for (const auto& vv : inst->v.range()) {
            std::set<Value> image;
            const auto cell = inst->u.range_given(inst->v, vv);
            for (const auto& uu : cell) {
                image.insert(*spec.at(uu, vv));
            }
            EXPECT_EQ(image.size(), cell.size());
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Theorem3, Examples) {
    const auto m = sp::demos::monty();
    const auto t = pv::theorem3_check(m.ptilde, m.u, m.v, m.credal);
    EXPECT_TRUE(t.canonical_marginal);
    EXPECT_TRUE(t.canonical_pivotal);
    EXPECT_TRUE(t.simple_pivot_exists);
    EXPECT_TRUE(t.exhaustive);

    // The helpful host's P~ gives 1/2 to two doors given {1,2}: outside the hypothesis.
    const auto h = helpful_host();
    EXPECT_EQ(code_of([&] { (void)pv::theorem3_check(h.ptilde, h.u, h.v, h.credal); }),
              sp::ErrorCode::HypothesisViolated);

    const Rv u("U", {num(0), num(1), num(2)});
    const Rv v = Rv::constant("V", 3);
    const Pmf p({Rational(1, 2), Rational(1, 3), Rational(1, 6)});
    const auto s = pv::theorem3_check(p, u, v, sp::CredalSet::singleton(p));
    EXPECT_TRUE(s.canonical_marginal && s.canonical_pivotal && s.simple_pivot_exists);
}

TEST(Theorem3Properties, ThreeWayAgreementWithExhaustiveSearch) {
    sp::testing::Gen g(82);
    int checked = 0;
    int holding = 0;
    while (checked < 600) {
        const auto inst = sp::testing::pivot_instance(g, 6);
        if (!inst) {
            continue;
        }
        ++checked;
        try {
            const auto t = pv::theorem3_check(inst->ptilde, inst->u, inst->v, inst->credal);
            EXPECT_TRUE(t.exhaustive);
            holding += t.canonical_pivotal ? 1 : 0;
        } catch (const sp::Error& e) {
            ADD_FAILURE() << "instance " << checked << ": " << e.what();
        }
    }
    EXPECT_GT(holding, 60);
    EXPECT_LT(holding, 540);
}

TEST(Theorem3Properties, SimplePivotalSafetyImpliesDecisionSafety) {
    sp::testing::Gen g(83);
    int exercised = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto inst = sp::testing::pivot_instance(g, 8);
        if (!inst) {
            continue;
        }
        const auto spec = pv::canonical_pivot(inst->ptilde, inst->u, inst->v);
        const auto structure = pv::check_pivot(spec, inst->u, inst->v, inst->credal);
        if (!structure.is_pivot || !structure.is_simple) {
            continue;
        }
        if (!pv::check_pivotal_safety(inst->ptilde, inst->u, inst->v, spec, inst->credal).holds) {
            continue;
        }
        for (const auto& loss : {sp::decisions::LossFunction::zero_one(), sp::decisions::LossFunction::brier()}) {
            const auto d = sp::decisions::check_decision_safety(inst->ptilde, inst->u, inst->v, loss, inst->credal);
            if (d.ties) {
                continue;
            }
            ++exercised;
            EXPECT_TRUE(d.verdict.holds) << loss.name() << " trial " << trial;
        }
    }
    EXPECT_GT(exercised, 50);
}
