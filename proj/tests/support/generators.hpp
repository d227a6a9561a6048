#pragma once

// Hand-rolled random instance generators for the property suites. Everything
// is driven by a seeded std::mt19937_64 so failures are reproducible from the
// printed seed.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "safeprob/core.hpp"

namespace safeprob::testing {

struct Instance {
    OutcomeSpace space;
    Rv u;
    Rv v;
    Rv w;  // extra variable, available as stratifier or coarsening source
    CredalSet credal;
    Pmf ptilde;
};

class Gen {
   public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
    }

    // Nonnegative integer weights, some zero with probability zero_p, total > 0.
    std::vector<Rational> weights(std::size_t n, double zero_p = 0.25, int max_weight = 6) {
        std::vector<Rational> w(n);
        bool any = false;
        for (auto& x : w) {
            x = coin(zero_p) ? Rational(0) : Rational(uniform(1, max_weight));
            any = any || !x.is_zero();
        }
        if (!any) {
            w[static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1))] = Rational(1);
        }
        return w;
    }

    Pmf pmf(std::size_t n, double zero_p = 0.25) { return Pmf::normalized(weights(n, zero_p)); }

    // Restricted to atoms where mask is true; at least one must be.
    Pmf pmf_on(const std::vector<bool>& mask, double zero_p = 0.25) {
        std::vector<Rational> w = weights(mask.size(), zero_p);
        bool any = false;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) {
                w[i] = Rational(0);
            }
            any = any || !w[i].is_zero();
        }
        if (!any) {
            for (std::size_t i = 0; i < mask.size(); ++i) {
                if (mask[i]) {
                    w[i] = Rational(1);
                    break;
                }
            }
        }
        return Pmf::normalized(std::move(w));
    }

    // Integer-labelled variable with values 0..k-1 on n atoms, surjective when n >= k.
    Rv labels(const std::string& name, std::size_t n, int k) {
        std::vector<int> xs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : uniform(0, k - 1);
        }
        std::shuffle(xs.begin(), xs.end(), rng_);
        std::vector<Value> vals;
        for (int x : xs) {
            vals.push_back(Value::numeric(Rational(x)));
        }
        return Rv(name, std::move(vals));
    }

    // Numeric variable with small rational values (possibly negative).
    Rv numeric(const std::string& name, std::size_t n, int k) {
        std::vector<Rational> pool;
        for (int i = 0; i < k; ++i) {
            pool.emplace_back(uniform(-4, 6), uniform(1, 3));
        }
        std::vector<Value> vals;
        for (std::size_t i = 0; i < n; ++i) {
            vals.push_back(Value::numeric(pick(pool)));
        }
        return Rv(name, std::move(vals));
    }

    static OutcomeSpace space(std::size_t n) {
        std::vector<std::string> atoms;
        for (std::size_t i = 0; i < n; ++i) {
            atoms.push_back("z" + std::to_string(i + 1));
        }
        return OutcomeSpace(std::move(atoms));
    }

    // Mixture of P~(.|V=v) with a random V-marginal: valid for U|V by construction.
    Pmf valid_vertex(const Pmf& ptilde, const Rv& v) {
        const auto vs = support(ptilde, v);
        std::vector<Rational> mix = weights(vs.size(), 0.3);
        Rational total;
        for (const auto& m : mix) {
            total += m;
        }
        std::vector<Rational> w(ptilde.size());
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const Pmf cond = condition(ptilde, v, vs[k]);
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] += mix[k] / total * cond[i];
            }
        }
        return Pmf(std::move(w));
    }

    // A distribution with the given U-marginal, spread randomly within each U-cell.
    Pmf with_u_marginal(const Rv& u, const Distribution& target) {
        std::vector<Rational> w(u.size());
        for (const auto& [uu, q] : target) {
            if (q.is_zero()) {
                continue;
            }
            std::vector<bool> mask(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                mask[i] = u(i) == uu;
            }
            const Pmf cell = pmf_on(mask, 0.3);
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] += q * cell[i];
            }
        }
        return Pmf(std::move(w));
    }

    // P~ under which U and V are independent, whenever every (u, v) cell is
    // realized; otherwise a random pmf.
    Pmf independent_pmf(const Rv& u, const Rv& v) {
        const auto ur = u.range();
        const auto vr = v.range();
        const auto mu = weights(ur.size(), 0.0);
        const auto mv = weights(vr.size(), 0.0);
        std::vector<Rational> w(u.size());
        for (std::size_t a = 0; a < ur.size(); ++a) {
            for (std::size_t b = 0; b < vr.size(); ++b) {
                std::vector<bool> mask(u.size());
                bool any = false;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    mask[i] = u(i) == ur[a] && v(i) == vr[b];
                    any = any || mask[i];
                }
                if (!any) {
                    return pmf(u.size());
                }
                const Pmf cell = pmf_on(mask, 0.3);
                for (std::size_t i = 0; i < w.size(); ++i) {
                    w[i] += mu[a] * mv[b] * cell[i];
                }
            }
        }
        return Pmf::normalized(std::move(w));
    }

    // Random instance for the hierarchy suite. The credal vertices are drawn
    // from several recipes so that every notion holds on a fair share of
    // instances.
    Instance instance(std::size_t max_atoms = 8, std::size_t max_vertices = 4, bool numeric_u = true) {
        const std::size_t n = static_cast<std::size_t>(uniform(2, static_cast<int>(max_atoms)));
        OutcomeSpace sp = space(n);
        const int ku = uniform(1, std::min<int>(3, static_cast<int>(n)));
        const int kv = uniform(1, std::min<int>(3, static_cast<int>(n)));
        Rv u = numeric_u && coin(0.3) ? numeric("U", n, ku) : labels("U", n, ku);
        Rv v = labels("V", n, kv);
        Rv w = labels("W", n, uniform(1, 2));

        const int recipe = uniform(0, 4);
        Pmf pt = recipe == 2 || recipe == 3 ? independent_pmf(u, v) : pmf(n, 0.15);
        // Full V-support keeps P~(U|V) essentially unique for every vertex.
        if (support(pt, v).size() != v.range().size()) {
            std::vector<Rational> ws = pt.weights();
            for (std::size_t i = 0; i < n; ++i) {
                ws[i] += Rational(1, 10);
            }
            pt = Pmf::normalized(std::move(ws));
        }

        const std::size_t m = static_cast<std::size_t>(uniform(1, static_cast<int>(max_vertices)));
        std::vector<Pmf> vs;
        for (std::size_t k = 0; k < m; ++k) {
            switch (recipe) {
                case 0: vs.push_back(pmf(n, 0.4)); break;
                case 1: vs.push_back(valid_vertex(pt, v)); break;
                case 2: vs.push_back(with_u_marginal(u, marginal(pt, u))); break;
                case 3: vs.push_back(coin() ? valid_vertex(pt, v) : pt); break;
                default: vs.push_back(coin(0.7) ? valid_vertex(pt, v) : pmf(n, 0.4)); break;
            }
        }
        return {std::move(sp), std::move(u), std::move(v), std::move(w), credal(std::move(vs)), std::move(pt)};
    }

    // from_vertices rejects repeats.
    static CredalSet credal(std::vector<Pmf> vs) {
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return CredalSet::from_vertices(std::move(vs));
    }

   private:
    std::mt19937_64 rng_;
};

// Instance on Z = range(U) x range(V) (one atom per pair, sometimes with a
// missing pair) with strictly positive P~ rows whose nonzero entries are
// distinct within each row. With probability 1/2 the rows are permutations of
// one vector, which is what pivotal safety needs.
struct PivotInstance {
    Rv u;
    Rv v;
    Pmf ptilde;
    CredalSet credal;
};

inline std::optional<PivotInstance> pivot_instance(Gen& g, std::size_t max_atoms) {
    const int m = g.uniform(1, 3);
    const int kv = g.uniform(1, std::max(1, static_cast<int>(max_atoms) / m));
    std::vector<Value> us;
    std::vector<Value> vs;
    std::vector<Rational> w;
    std::vector<Rational> base;
    for (int i = 0; i < m; ++i) {
        base.emplace_back(g.uniform(1, 9));
    }
    const bool permuted = g.coin();
    const bool ragged = g.coin(0.15) && m > 1 && kv > 1;
    for (int b = 0; b < kv; ++b) {
        std::vector<Rational> row = base;
        if (permuted) {
            std::shuffle(row.begin(), row.end(), g.rng());
        } else {
            for (auto& x : row) {
                x = Rational(g.uniform(1, 9));
            }
        }
        const int cells = ragged && b == 0 ? m - 1 : m;
        Rational total;
        for (int i = 0; i < cells; ++i) {
            total += row[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < cells; ++i) {
            us.push_back(Value::numeric(Rational(i)));
            vs.push_back(Value::numeric(Rational(b)));
            w.push_back(row[static_cast<std::size_t>(i)] / total / Rational(kv));
        }
    }
    const Pmf pt(w);
    const Rv u("U", us);
    const Rv v("V", vs);
    // Uniqueness condition.
    const auto table = conditional_table(pt, u, v);
    for (const auto& [_, r] : table.rows) {
        std::vector<Rational> nz;
        for (const auto& [__, q] : r) {
            if (!q.is_zero()) {
                nz.push_back(q);
            }
        }
        std::sort(nz.begin(), nz.end());
        if (std::adjacent_find(nz.begin(), nz.end()) != nz.end()) {
            return std::nullopt;
        }
    }
    std::vector<Pmf> vertices;
    const int nv = g.uniform(1, 3);
    for (int k = 0; k < nv; ++k) {
        vertices.push_back(g.coin(0.75) ? g.valid_vertex(pt, v) : g.pmf(pt.size(), 0.3));
    }
    return PivotInstance{u, v, pt, Gen::credal(std::move(vertices))};
}


}  // namespace safeprob::testing
