#include "safeprob/confidence.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "safeprob/detail/monte_carlo.hpp"
#include "safeprob/error.hpp"

namespace safeprob::confidence {

double normal_cdf(double x) {
    if (std::isnan(x)) {
        throw Error(ErrorCode::DomainError, "normal_cdf of NaN");
    }
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double gamma_reg(double shape, double x) {
    if (!(shape > 0) || !(x >= 0) || std::isinf(shape)) {
        throw Error(ErrorCode::DomainError, "gamma_reg requires shape > 0 and x >= 0");
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    return boost::math::gamma_p(shape, x);
}

ParametricFamily1D::ParametricFamily1D(std::string name, OpenInterval theta_domain, OpenInterval statistic_domain,
                                       int n, Cdf cdf, Sampler sampler, Center center)
    : name_(std::move(name)),
      theta_domain_(theta_domain),
      statistic_domain_(statistic_domain),
      n_(n),
      cdf_(std::move(cdf)),
      sampler_(std::move(sampler)),
      center_(std::move(center)) {
    if (n_ < 1) {
        throw Error(ErrorCode::DomainError, "sample size must be positive");
    }
    if (!(theta_domain_.lower < theta_domain_.upper) || !(statistic_domain_.lower < statistic_domain_.upper)) {
        throw Error(ErrorCode::DomainError, "empty domain in family '" + name_ + "'");
    }
}

ParametricFamily1D ParametricFamily1D::normal_location(int n) {
    if (n < 1) {
        throw Error(ErrorCode::DomainError, "sample size must be positive");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    return ParametricFamily1D(
        "normal", {}, {}, n, [root_n](double theta, double v) { return normal_cdf(root_n * (v - theta)); },
        [root_n](double theta, std::mt19937_64& rng) {
            std::normal_distribution<double> z(0.0, 1.0);
            return theta + z(rng) / root_n;
        },
        [](double v) { return v; });
}

ParametricFamily1D ParametricFamily1D::exponential_mean(int n) {
    if (n < 1) {
        throw Error(ErrorCode::DomainError, "sample size must be positive");
    }
    const double shape = n;
    const OpenInterval positive{0.0, std::numeric_limits<double>::infinity()};
    return ParametricFamily1D(
        "expmean", positive, positive, n, [shape](double mu, double s) { return gamma_reg(shape, s / mu); },
        [shape](double mu, std::mt19937_64& rng) {
            std::gamma_distribution<double> g(shape, mu);
            return g(rng);
        },
        [shape](double s) { return s / shape; });
}

ParametricFamily1D ParametricFamily1D::from_pivot(std::string name, OpenInterval theta_domain,
                                                  OpenInterval statistic_domain, int n,
                                                  std::function<double(double, double)> pivot,
                                                  std::function<double(double)> pivot_cdf, bool increasing_in_theta,
                                                  Sampler sampler, Center center) {
    // F_theta(v) is chosen so that 1 - F_theta(v) is the pivot-based F~.
    Cdf cdf = [pivot = std::move(pivot), g = std::move(pivot_cdf), increasing_in_theta](double theta, double v) {
        const double q = g(pivot(theta, v));
        return increasing_in_theta ? 1.0 - q : q;
    };
    return ParametricFamily1D(std::move(name), theta_domain, statistic_domain, n, std::move(cdf), std::move(sampler),
                              std::move(center));
}

double confidence_cdf(const ParametricFamily1D& family, double v, double theta) {
    if (!family.statistic_domain().contains(v)) {
        throw Error(ErrorCode::DomainError, "statistic value outside the domain of '" + family.name() + "'");
    }
    if (!family.theta_domain().contains(theta)) {
        throw Error(ErrorCode::DomainError, "parameter value outside the domain of '" + family.name() + "'");
    }
    return std::clamp(1.0 - family.cdf(theta, v), 0.0, 1.0);
}

namespace {

// Point 2^-k of the way from `center` to a finite end, or 2^k away from it
// when that end is infinite.
double probe(double center, double end, int k) {
    if (std::isinf(end)) {
        return end > 0 ? center + std::ldexp(1.0, k) : center - std::ldexp(1.0, k);
    }
    return end + (center - end) * std::ldexp(1.0, -k);
}

double quantile(const ParametricFamily1D& family, double v, double q) {
    const auto& dom = family.theta_domain();
    const double c = family.center(v);
    if (!dom.contains(c)) {
        throw Error(ErrorCode::DomainError, "family center outside the parameter domain");
    }
    auto f = [&](double theta) { return confidence_cdf(family, v, theta); };

    double lo = c;
    double hi = c;
    bool have_lo = f(lo) <= q;
    bool have_hi = f(hi) >= q;
    for (int k = 0; k <= kMaxBracketDoublings && !have_lo; ++k) {
        lo = probe(c, dom.lower, k);
        have_lo = dom.contains(lo) && f(lo) <= q;
    }
    for (int k = 0; k <= kMaxBracketDoublings && !have_hi; ++k) {
        hi = probe(c, dom.upper, k);
        have_hi = dom.contains(hi) && f(hi) >= q;
    }
    if (!have_lo || !have_hi) {
        throw Error(ErrorCode::BracketingFailure, "no bracket for the " + std::to_string(q) + " quantile at v=" +
                                                      std::to_string(v) + " in family '" + family.name() + "'");
    }
    for (int it = 0; it < 400 && hi - lo > kRootTolerance; ++it) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) {
            break;
        }
        (f(mid) < q ? lo : hi) = mid;
    }
    return lo + (hi - lo) / 2;
}

}  // namespace

CredibleInterval credible_interval(const ParametricFamily1D& family, double v, double a, double b) {
    if (!(a >= 0 && a < b && b <= 1)) {
        throw Error(ErrorCode::DomainError, "credible levels must satisfy 0 <= a < b <= 1");
    }
    if (!family.statistic_domain().contains(v)) {
        throw Error(ErrorCode::DomainError, "statistic value outside the domain of '" + family.name() + "'");
    }
    CredibleInterval out;
    out.a = a;
    out.b = b;
    out.lower = a == 0 ? family.theta_domain().lower : quantile(family, v, a);
    out.upper = b == 1 ? family.theta_domain().upper : quantile(family, v, b);
    return out;
}

namespace {

struct CoverageShard {
    std::uint64_t inside = 0;
    std::uint64_t checks = 0;
    std::uint64_t mismatches = 0;
};

// Every 100th draw also solves the interval endpoints.
constexpr std::uint64_t kCrossCheckStride = 100;

}  // namespace

CoverageEstimate coverage_estimate(const ParametricFamily1D& family, double theta0, double a, double b,
                                   std::uint64_t samples, std::uint64_t seed) {
    if (!(a >= 0 && a < b && b <= 1)) {
        throw Error(ErrorCode::DomainError, "credible levels must satisfy 0 <= a < b <= 1");
    }
    if (!family.theta_domain().contains(theta0)) {
        throw Error(ErrorCode::DomainError, "theta0 outside the parameter domain");
    }
    if (samples == 0) {
        throw Error(ErrorCode::DomainError, "coverage needs at least one sample");
    }
    const auto shards = detail::run_shards<CoverageShard>(
        samples, seed, [&](std::mt19937_64& rng, std::uint64_t first, std::uint64_t count, CoverageShard& acc) {
            for (std::uint64_t j = 0; j < count; ++j) {
                const double v = family.sample(theta0, rng);
                const double level = confidence_cdf(family, v, theta0);
                const bool inside = a <= level && level <= b;
                acc.inside += inside ? 1 : 0;
                if ((first + j) % kCrossCheckStride == 0) {
                    const auto ci = credible_interval(family, v, a, b);
                    // Within the root tolerance of an endpoint either answer is acceptable.
                    const bool clear_in = ci.lower + kRootTolerance < theta0 && theta0 < ci.upper - kRootTolerance;
                    const bool clear_out = theta0 < ci.lower - kRootTolerance || theta0 > ci.upper + kRootTolerance;
                    ++acc.checks;
                    if ((clear_in && !inside) || (clear_out && inside)) {
                        ++acc.mismatches;
                    }
                }
            }
        });
    CoverageEstimate out;
    std::uint64_t inside = 0;
    for (const auto& s : shards) {
        inside += s.inside;
        out.endpoint_checks += s.checks;
        out.endpoint_mismatches += s.mismatches;
    }
    out.samples = samples;
    out.coverage = static_cast<double>(inside) / static_cast<double>(samples);
    out.standard_error = std::sqrt(out.coverage * (1 - out.coverage) / static_cast<double>(samples));
    return out;
}

double pivot_uniformity(const ParametricFamily1D& family, double theta0, std::uint64_t samples, std::uint64_t seed) {
    if (!family.theta_domain().contains(theta0)) {
        throw Error(ErrorCode::DomainError, "theta0 outside the parameter domain");
    }
    if (samples == 0) {
        throw Error(ErrorCode::DomainError, "uniformity check needs at least one sample");
    }
    const auto shards = detail::run_shards<std::vector<double>>(
        samples, seed, [&](std::mt19937_64& rng, std::uint64_t, std::uint64_t count, std::vector<double>& acc) {
            acc.reserve(count);
            for (std::uint64_t j = 0; j < count; ++j) {
                acc.push_back(family.cdf(theta0, family.sample(theta0, rng)));
            }
        });
    std::vector<double> u;
    u.reserve(samples);
    for (const auto& s : shards) {
        u.insert(u.end(), s.begin(), s.end());
    }
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max({d, (static_cast<double>(i) + 1) / n - u[i], u[i] - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace safeprob::confidence
