#include "safeprob/rational.hpp"

#include <cctype>

#include "safeprob/error.hpp"

namespace safeprob {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c)) == 0) {
            return false;
        }
    }
    return true;
}

}  // namespace

Rational::Rational(long numerator, long denominator) {
    if (denominator == 0) {
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    }
    q_ = mpq_class(numerator, denominator);
    q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) {
        throw Error(ErrorCode::InvalidArgument, "division by zero");
    }
    q_ /= o.q_;
    return *this;
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    bool negative = false;
    std::string_view body = text;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    mpq_class value;
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto num = body.substr(0, slash);
        const auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            return std::nullopt;
        }
        mpz_class n(std::string(num), 10);
        mpz_class d(std::string(den), 10);
        if (d == 0) {
            return std::nullopt;
        }
        value = mpq_class(n, d);
    } else if (const auto dot = body.find('.'); dot != std::string_view::npos) {
        const auto whole = body.substr(0, dot);
        const auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) {
            return std::nullopt;
        }
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
        mpz_class f(std::string(frac), 10);
        value = mpq_class(w * scale + f, scale);
    } else {
        if (!all_digits(body)) {
            return std::nullopt;
        }
        value = mpq_class(mpz_class(std::string(body), 10));
    }
    value.canonicalize();
    if (negative) {
        value = -value;
    }
    return Rational(value);
}

std::size_t Rational::hash() const {
    return std::hash<std::string>{}(q_.get_str());
}

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InfeasibleCredalSet: return "InfeasibleCredalSet";
        case ErrorCode::SizeLimit: return "SizeLimit";
        case ErrorCode::ZeroProbabilityConditioning: return "ZeroProbabilityConditioning";
        case ErrorCode::NotEssentiallyUnique: return "NotEssentiallyUnique";
        case ErrorCode::NonNumericTarget: return "NonNumericTarget";
        case ErrorCode::MissingDetermination: return "MissingDetermination";
        case ErrorCode::EquivalenceViolation: return "EquivalenceViolation";
        case ErrorCode::NotFullSupport: return "NotFullSupport";
        case ErrorCode::NotAPivot: return "NotAPivot";
        case ErrorCode::UniquenessViolated: return "UniquenessViolated";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::InfiniteLoss: return "InfiniteLoss";
        case ErrorCode::ZeroMassObservable: return "ZeroMassObservable";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::BracketingFailure: return "BracketingFailure";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace safeprob
