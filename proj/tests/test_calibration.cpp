#include <gtest/gtest.h>

#include <map>

#include "safeprob/calibration.hpp"
#include "safeprob/demos.hpp"
#include "safeprob/safety.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace sp = safeprob;
using sp::Pmf;
using sp::Rational;
using sp::Rv;
using sp::Value;
namespace cal = sp::calibration;

namespace {

Value num(long x) { return Value::numeric(Rational(x)); }

Rv coarsen(sp::testing::Gen& g, const Rv& v, const std::string& name, int blocks) {
    std::map<Value, Value> f;
    for (const auto& vv : v.range()) {
        f.emplace(vv, num(g.uniform(0, blocks - 1)));
    }
    return Rv::map(name, v, [&](const Value& x) { return f.at(x); });
}

}  // namespace

TEST(Calibration, DilationIsCalibrated) {
    const auto s = sp::demos::dilation();
    EXPECT_TRUE(cal::check_calibrated_full(s.u, s.v, s.ptilde, s.credal).holds);
    const auto t = cal::theorem1_check(s.u, s.v, s.ptilde, s.credal);
    EXPECT_TRUE(t.calibrated);
    EXPECT_TRUE(t.stratified_marginal);
    EXPECT_TRUE(t.valid_given_prediction);
    ASSERT_TRUE(t.witness_vprime);
    EXPECT_EQ(t.witness_vprime->range().size(), 1U);  // the constant
}

TEST(Calibration, DistanceVariableIsNotCalibrated) {
    const auto s = sp::demos::dilation();
    std::vector<Value> table;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        table.push_back(Value::numeric(sp::abs(s.v(i).scalar() - s.u(i).scalar())));
    }
    const Rv uprime("U'", table);
    const auto rows = sp::conditional_table(s.ptilde, uprime, s.v);
    EXPECT_EQ(rows.row(num(0)).at(num(1)), Rational(9, 10));
    EXPECT_EQ(rows.row(num(1)).at(num(1)), Rational(1, 10));

    const auto verdict = cal::check_calibrated_full(uprime, s.v, s.ptilde, s.credal);
    ASSERT_FALSE(verdict.holds);
    // The reported witness fails on its own.
    EXPECT_FALSE(sp::oracle::calibrated_by_grouping(uprime, s.v, s.ptilde,
                                                    sp::CredalSet::singleton(verdict.counterexample->vertex)));
    // The vertex with U = V almost surely is a counterexample: there U' = 0.
    const Pmf diagonal({0, Rational(9, 10), Rational(1, 10), 0});
    ASSERT_NE(std::find(s.credal.vertices().begin(), s.credal.vertices().end(), diagonal), s.credal.vertices().end());
    for (std::size_t i = 0; i < diagonal.size(); ++i) {
        if (!diagonal[i].is_zero()) {
            EXPECT_EQ(s.u(i), s.v(i));
        }
    }
    EXPECT_EQ(sp::probability(diagonal, uprime, num(1)), Rational(0));
    EXPECT_FALSE(cal::check_calibrated_full(uprime, s.v, s.ptilde, sp::CredalSet::singleton(diagonal)).holds);
    const auto t = cal::theorem1_check(uprime, s.v, s.ptilde, s.credal);
    EXPECT_FALSE(t.calibrated);
    EXPECT_FALSE(t.stratified_marginal);
    EXPECT_FALSE(t.valid_given_prediction);
    EXPECT_FALSE(t.witness_vprime);
}

TEST(Calibration, SingletonTruthWitnessIsV) {
    const Rv u("U", {num(0), num(1), num(0), num(1)});
    const Rv v("V", {num(0), num(0), num(1), num(1)});
    const Pmf p({Rational(1, 10), Rational(2, 10), Rational(3, 10), Rational(4, 10)});
    const auto c = sp::CredalSet::singleton(p);
    EXPECT_TRUE(cal::check_calibrated_full(u, v, p, c).holds);
    const auto t = cal::theorem1_check(u, v, p, c);
    EXPECT_TRUE(t.calibrated);
    ASSERT_TRUE(t.witness_vprime);
    EXPECT_EQ(t.witness_vprime->table(), v.table());
}

TEST(Calibration, ToleranceRelaxesEquality) {
    const auto s = sp::demos::dilation();
    std::vector<Value> table;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        table.push_back(Value::numeric(sp::abs(s.v(i).scalar() - s.u(i).scalar())));
    }
    const Rv uprime("U'", table);
    EXPECT_FALSE(cal::check_calibrated_full(uprime, s.v, s.ptilde, s.credal, Rational(1, 2)).holds);
    EXPECT_TRUE(cal::check_calibrated_full(uprime, s.v, s.ptilde, s.credal, Rational(9, 10)).holds);
    EXPECT_THROW(cal::check_calibrated_full(uprime, s.v, s.ptilde, s.credal, Rational(-1)), sp::Error);
}

TEST(Calibration, MeanAgreesWithFullForBinaryTargets) {
    sp::testing::Gen g(61);
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = g.instance();
        const Rv b = Rv::map("B", inst.u, [&](const Value& x) { return num(x == inst.u(0) ? 1 : 0); });
        EXPECT_EQ(cal::check_calibrated_mean(b, inst.v, inst.ptilde, inst.credal).holds,
                  cal::check_calibrated_full(b, inst.v, inst.ptilde, inst.credal).holds)
            << "trial " << trial;
    }
}

TEST(Calibration, ConstantPredictorEqualToEveryMeanIsMeanCalibrated) {
    const auto s = sp::demos::dilation();  // E~[U|V] = 9/10 = E_P[U] for every P
    EXPECT_TRUE(cal::check_calibrated_mean(s.u, s.v, s.ptilde, s.credal).holds);
}

TEST(Calibration, ExtendedDilationMatchesBruteForce) {
    const auto s = sp::demos::dilation_extended();
    EXPECT_EQ(cal::check_calibrated_full(s.u, s.v, s.ptilde, s.credal).holds,
              sp::oracle::calibrated_by_grouping(s.u, s.v, s.ptilde, s.credal));
    EXPECT_EQ(cal::check_calibrated_mean(s.u, s.v, s.ptilde, s.credal).holds,
              sp::oracle::mean_calibrated_by_grouping(s.u, s.v, s.ptilde, s.credal));
    const Rv one = Rv::indicator("1{U=1}", s.u, num(1));
    EXPECT_TRUE(cal::check_calibrated_full(one, s.v, s.ptilde, s.credal).holds);
}

TEST(Calibration, RandomInstancesMatchBruteForce) {
    sp::testing::Gen g(62);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = g.instance();
        EXPECT_EQ(cal::check_calibrated_full(inst.u, inst.v, inst.ptilde, inst.credal).holds,
                  sp::oracle::calibrated_by_grouping(inst.u, inst.v, inst.ptilde, inst.credal));
        EXPECT_EQ(cal::check_calibrated_mean(inst.u, inst.v, inst.ptilde, inst.credal).holds,
                  sp::oracle::mean_calibrated_by_grouping(inst.u, inst.v, inst.ptilde, inst.credal));
    }
}

TEST(Ignores, Examples) {
    const auto s = sp::demos::dilation();
    EXPECT_TRUE(cal::ignores(s.ptilde, s.u, s.v, s.v));
    EXPECT_TRUE(cal::ignores(s.ptilde, s.u, s.v, Rv::constant("0", 4)));
    const Pmf distinct({Rational(1, 2), Rational(1, 4), 0, Rational(1, 4)});
    EXPECT_FALSE(cal::ignores(distinct, s.u, s.v, Rv::constant("0", 4)));
    try {
        (void)cal::ignores(s.ptilde, s.u, Rv::constant("0", 4), s.v);
        FAIL();
    } catch (const sp::Error& e) {
        EXPECT_EQ(e.code(), sp::ErrorCode::MissingDetermination);
    }
}

TEST(CalibrationProperties, Theorem1ThreeWayAgreement) {
    sp::testing::Gen g(71);
    int agreed = 0;
    int calibrated = 0;
    for (int trial = 0; trial < 600; ++trial) {
        const auto inst = g.instance();
        try {
            const auto t = cal::theorem1_check(inst.u, inst.v, inst.ptilde, inst.credal);
            ++agreed;
            calibrated += t.calibrated ? 1 : 0;
            EXPECT_EQ(t.calibrated, t.witness_vprime.has_value());
        } catch (const sp::Error& e) {
            ADD_FAILURE() << "trial " << trial << ": " << e.what();
        }
    }
    EXPECT_EQ(agreed, 600);
    EXPECT_GT(calibrated, 60);
    EXPECT_LT(calibrated, 540);
}

TEST(CalibrationProperties, Proposition2FourWayAgreement) {
    sp::testing::Gen g(72);
    int ignoring = 0;
    for (int trial = 0; trial < 600; ++trial) {
        const auto inst = g.instance();
        const Rv vprime = coarsen(g, inst.v, "V'", g.uniform(1, 2));
        const auto c = cal::ignore_clauses(inst.ptilde, inst.u, inst.v, vprime);
        EXPECT_EQ(c.conditional_ignores, c.rows_match) << "trial " << trial;
        EXPECT_EQ(c.conditional_ignores, c.determines_prediction) << "trial " << trial;
        EXPECT_EQ(c.conditional_ignores, c.prediction_suffices) << "trial " << trial;
        ignoring += c.conditional_ignores ? 1 : 0;

        // Final part: validity for U|V transfers to U|V' when P~(U|V,V') ignores V.
        const auto valid = sp::safety::check_safety(
            {inst.u, sp::safety::LeftMode::Full, inst.v, sp::safety::RightMode::Plain, std::nullopt}, inst.ptilde,
            inst.credal);
        if (valid.holds && c.conditional_ignores) {
            EXPECT_TRUE(sp::safety::check_safety({inst.u, sp::safety::LeftMode::Full, vprime,
                                                  sp::safety::RightMode::Plain, std::nullopt},
                                                 inst.ptilde, inst.credal)
                            .holds)
                << "trial " << trial;
        }
    }
    EXPECT_GT(ignoring, 60);
    EXPECT_LT(ignoring, 540);
}

TEST(CalibrationProperties, ValidityImpliesCalibrationAndCoarseningPreservesIt) {
    sp::testing::Gen g(73);
    int calibrated = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto inst = g.instance();
        const bool valid = sp::safety::check_safety({inst.u, sp::safety::LeftMode::Full, inst.v,
                                                     sp::safety::RightMode::Plain, std::nullopt},
                                                    inst.ptilde, inst.credal)
                               .holds;
        const bool cal_u = cal::check_calibrated_full(inst.u, inst.v, inst.ptilde, inst.credal).holds;
        if (valid) {
            EXPECT_TRUE(cal_u) << "trial " << trial;
        }
        if (cal_u) {
            ++calibrated;
            const Rv fu = coarsen(g, inst.u, "f(U)", 2);
            EXPECT_TRUE(cal::check_calibrated_full(fu, inst.v, inst.ptilde, inst.credal).holds) << "trial " << trial;
        }
    }
    EXPECT_GT(calibrated, 50);
}
