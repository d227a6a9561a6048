#pragma once

#include <optional>
#include <vector>

#include "safeprob/rational.hpp"

namespace safeprob::detail {

using Matrix = std::vector<std::vector<Rational>>;
using Vector = std::vector<Rational>;

struct SolveResult {
    std::size_t rank = 0;
    bool consistent = false;
    // Present when the system is consistent and has full column rank.
    std::optional<Vector> unique_solution;
};

// Gauss-Jordan elimination of A x = b over the rationals.
SolveResult solve(Matrix a, Vector b);

// Some x >= 0 with A x = b, or nullopt. Phase-I simplex with Bland's rule,
// so it terminates on degenerate problems.
std::optional<Vector> nonnegative_solution(const Matrix& a, const Vector& b);

}  // namespace safeprob::detail
