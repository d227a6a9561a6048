#pragma once

// One-dimensional confidence distributions. A family {P_theta} with a scalar
// statistic V whose CDF F_theta(v) decreases in theta yields the confidence
// CDF F~(theta | v) = 1 - F_theta(v). Credible intervals of F~ are then exact
// confidence intervals, which coverage_estimate verifies by simulation.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>

namespace safeprob::confidence {

double normal_cdf(double x);
// Regularized lower incomplete gamma P(shape, x). shape > 0, x >= 0.
double gamma_reg(double shape, double x);

struct OpenInterval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool contains(double x) const { return x > lower && x < upper; }
};

class ParametricFamily1D {
   public:
    using Cdf = std::function<double(double theta, double v)>;
    using Sampler = std::function<double(double theta, std::mt19937_64& rng)>;
    using Center = std::function<double(double v)>;

    ParametricFamily1D(std::string name, OpenInterval theta_domain, OpenInterval statistic_domain, int n, Cdf cdf,
                       Sampler sampler, Center center);

    // Sample mean of n draws from N(theta, 1).
    static ParametricFamily1D normal_location(int n);
    // Sum of n draws from the exponential distribution with mean theta.
    static ParametricFamily1D exponential_mean(int n);
    // Built from a pivot f(theta, v) whose law has CDF g under every theta.
    // F~(theta|v) = g(f) if f increases in theta, 1 - g(f) if it decreases.
    static ParametricFamily1D from_pivot(std::string name, OpenInterval theta_domain, OpenInterval statistic_domain,
                                         int n, std::function<double(double theta, double v)> pivot,
                                         std::function<double(double)> pivot_cdf, bool increasing_in_theta,
                                         Sampler sampler, Center center);

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const OpenInterval& theta_domain() const { return theta_domain_; }
    [[nodiscard]] const OpenInterval& statistic_domain() const { return statistic_domain_; }
    [[nodiscard]] int n() const { return n_; }
    // F_theta(v) = P_theta(V <= v).
    [[nodiscard]] double cdf(double theta, double v) const { return cdf_(theta, v); }
    [[nodiscard]] double sample(double theta, std::mt19937_64& rng) const { return sampler_(theta, rng); }
    // Starting point for bracketing the confidence quantiles at v.
    [[nodiscard]] double center(double v) const { return center_(v); }

   private:
    std::string name_;
    OpenInterval theta_domain_;
    OpenInterval statistic_domain_;
    int n_;
    Cdf cdf_;
    Sampler sampler_;
    Center center_;
};

// F~(theta | v), clamped to [0, 1]. DomainError outside the domains.
double confidence_cdf(const ParametricFamily1D& family, double v, double theta);

struct CredibleInterval {
    double lower = 0;
    double upper = 0;
    double a = 0;
    double b = 1;
};

inline constexpr double kRootTolerance = 1e-10;
inline constexpr int kMaxBracketDoublings = 60;

// Solves F~(lower|v) = a and F~(upper|v) = b by bisection. a = 0 and b = 1
// give the domain ends. BracketingFailure if no sign change is found.
CredibleInterval credible_interval(const ParametricFamily1D& family, double v, double a, double b);

struct CoverageEstimate {
    double coverage = 0;
    double standard_error = 0;
    std::uint64_t samples = 0;
    std::uint64_t endpoint_checks = 0;      // draws where the interval was solved explicitly
    std::uint64_t endpoint_mismatches = 0;  // of those, disagreements with the fast path
};

// Fraction of V ~ P_theta0 for which theta0 lies in the [a, b] credible
// interval. Deterministic for a given seed.
CoverageEstimate coverage_estimate(const ParametricFamily1D& family, double theta0, double a, double b,
                                   std::uint64_t samples, std::uint64_t seed);

// Sup-norm distance between the empirical CDF of F_theta0(V), V ~ P_theta0,
// and the uniform CDF.
double pivot_uniformity(const ParametricFamily1D& family, double theta0, std::uint64_t samples, std::uint64_t seed);

}  // namespace safeprob::confidence
