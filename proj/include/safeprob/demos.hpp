#pragma once

// The worked scenarios behind `safeprob demo`. Every number a demo prints is
// computed here from its parameters.

#include <cstdint>
#include <vector>

#include "safeprob/core.hpp"
#include "safeprob/report.hpp"
#include "safeprob/updates.hpp"

namespace safeprob::demos {

struct Setup {
    OutcomeSpace space;
    Rv u;
    Rv v;
    CredalSet credal;
    Pmf ptilde;
};

// U, V binary; P* = {P : P(U=1) = p}; P~ makes U and V independent with
// P~(U=1) = p. Atoms in the order (1,0), (1,1), (0,0), (0,1).
Setup dilation(const Rational& p = Rational(9, 10));

// U in {0,1,2}; P* = {P : P(U=1) = p1}; P~(U=1|v) = p1 and P~(U=2|v) = p2 for
// both v. Atoms ordered by u, then v.
Setup dilation_extended(const Rational& p1 = Rational(9, 10), const Rational& p2 = Rational(9, 100));

struct MontyParams {
    std::vector<Rational> prior{Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    // P~(host reveals door 3 | car behind door 1); the observed event is then {1,2}.
    Rational coin{1, 2};
};

updates::EventScenario monty_events(const MontyParams& params = {});
// Space, credal set and V from the event construction; P~ from the host's coin.
Setup monty(const MontyParams& params = {});

struct DemoResult {
    cli::Json report;
    bool assertions_hold = false;
};

DemoResult dilation_demo(const Rational& p = Rational(9, 10));
DemoResult monty_demo(const MontyParams& params = {});
DemoResult gamble_demo(double theta_bar = -0.2, int n = 10, std::uint64_t samples = 1000000, std::uint64_t seed = 1);

inline constexpr double kGambleTolerance = 0.005;

}  // namespace safeprob::demos
