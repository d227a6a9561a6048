#include "safeprob/detail/exact_linalg.hpp"

#include <cassert>

namespace safeprob::detail {

SolveResult solve(Matrix a, Vector b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a.front().size();
    assert(b.size() == rows);

    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && a[sel][c].is_zero()) {
            ++sel;
        }
        if (sel == rows) {
            continue;
        }
        std::swap(a[sel], a[r]);
        std::swap(b[sel], b[r]);
        const Rational inv = Rational(1) / a[r][c];
        for (std::size_t k = c; k < cols; ++k) {
            a[r][k] *= inv;
        }
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) {
                continue;
            }
            const Rational f = a[i][c];
            for (std::size_t k = c; k < cols; ++k) {
                a[i][k] -= f * a[r][k];
            }
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }

    SolveResult out;
    out.rank = r;
    out.consistent = true;
    for (std::size_t i = r; i < rows; ++i) {
        if (!b[i].is_zero()) {
            out.consistent = false;
        }
    }
    if (out.consistent && r == cols) {
        Vector x(cols);
        for (std::size_t i = 0; i < r; ++i) {
            x[pivot_col[i]] = b[i];
        }
        out.unique_solution = std::move(x);
    }
    return out;
}

std::optional<Vector> nonnegative_solution(const Matrix& a, const Vector& b) {
    const std::size_t m = a.size();
    const std::size_t n = m == 0 ? 0 : a.front().size();
    if (m == 0) {
        return Vector(n);
    }

    // Tableau columns: n originals, m artificials, then the right-hand side.
    const std::size_t width = n + m + 1;
    Matrix t(m, Vector(width));
    for (std::size_t i = 0; i < m; ++i) {
        const bool flip = b[i].sign() < 0;
        for (std::size_t j = 0; j < n; ++j) {
            t[i][j] = flip ? -a[i][j] : a[i][j];
        }
        t[i][n + i] = Rational(1);
        t[i][n + m] = flip ? -b[i] : b[i];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        basis[i] = n + i;
    }

    // Reduced costs of the phase-I objective (sum of artificials).
    Vector cost(width);
    for (std::size_t j = 0; j < width; ++j) {
        if (j >= n && j < n + m) {
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) {
            cost[j] -= t[i][j];
        }
    }

    while (true) {
        std::size_t enter = width;
        for (std::size_t j = 0; j + 1 < width; ++j) {
            if (cost[j].sign() < 0) {
                enter = j;
                break;
            }
        }
        if (enter == width) {
            break;
        }
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter].sign() <= 0) {
                continue;
            }
            const Rational ratio = t[i][width - 1] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) {
            break;  // unbounded direction; cannot happen for phase I
        }
        const Rational inv = Rational(1) / t[leave][enter];
        for (auto& x : t[leave]) {
            x *= inv;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter].is_zero()) {
                continue;
            }
            const Rational f = t[i][enter];
            for (std::size_t k = 0; k < width; ++k) {
                t[i][k] -= f * t[leave][k];
            }
        }
        if (!cost[enter].is_zero()) {
            const Rational f = cost[enter];
            for (std::size_t k = 0; k < width; ++k) {
                cost[k] -= f * t[leave][k];
            }
        }
        basis[leave] = enter;
    }

    // Objective value is -cost[rhs]; feasible iff it is zero.
    if (!cost[width - 1].is_zero()) {
        return std::nullopt;
    }
    Vector x(n);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) {
            x[basis[i]] = t[i][width - 1];
        }
    }
    return x;
}

}  // namespace safeprob::detail
