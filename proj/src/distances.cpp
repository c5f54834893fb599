#include "mixlab/distances.hpp"

#include "mixlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace mixlab {

namespace {

void require_same_size(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "distributions have different lengths");
}

}  // namespace

int rho(Kind kind) {
    switch (kind) {
        case Kind::TV: return 1;
        case Kind::Hellinger: return 2;
        case Kind::L2: break;
    }
    throw Error(ErrorCode::InvalidKind, "rho is undefined for the L2 distance");
}

const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::TV: return "tv";
        case Kind::Hellinger: return "hellinger";
        case Kind::L2: return "l2";
    }
    return "unknown";
}

Kind parse_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "tv") return Kind::TV;
    if (lower == "hellinger" || lower == "h") return Kind::Hellinger;
    if (lower == "l2") return Kind::L2;
    throw Error(ErrorCode::InvalidKind, "unknown distance kind '" + std::string(text) + "'");
}

double tv_distance(const Vector& mu, const Vector& nu) {
    require_same_size(mu, nu);
    return std::min(1.0, 0.5 * (mu - nu).lpNorm<1>());
}

double hellinger_distance(const Vector& mu, const Vector& nu) {
    require_same_size(mu, nu);
    // 1 - sum sqrt(mu nu) written as half the squared distance of square roots, which
    // keeps relative accuracy when mu is close to nu.
    double acc = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        const double d = std::sqrt(std::max(mu[i], 0.0)) - std::sqrt(std::max(nu[i], 0.0));
        acc += d * d;
    }
    return std::sqrt(std::clamp(0.5 * acc, 0.0, 1.0));
}

double l2_distance(const Vector& mu, const Vector& pi) {
    require_same_size(mu, pi);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (!(pi[i] > 0.0)) throw Error(ErrorCode::ZeroStationaryMass, "l2 distance needs a strictly positive reference");
        const double r = mu[i] / pi[i] - 1.0;
        acc += r * r * pi[i];
    }
    return std::sqrt(acc);
}

double distance(Kind kind, const Vector& mu, const Vector& pi) {
    switch (kind) {
        case Kind::TV: return tv_distance(mu, pi);
        case Kind::Hellinger: return hellinger_distance(mu, pi);
        case Kind::L2: return l2_distance(mu, pi);
    }
    throw Error(ErrorCode::InvalidKind, "unknown distance kind");
}

SandwichGaps sandwich_gaps(double tv, double hellinger) {
    const double h2 = hellinger * hellinger;
    const double lower = tv * tv / (1.0 + std::sqrt(std::max(0.0, 1.0 - tv * tv)));
    return {h2 - lower, tv - h2};
}

SandwichGaps sandwich_check(const Vector& mu, const Vector& nu) {
    return sandwich_gaps(tv_distance(mu, nu), hellinger_distance(mu, nu));
}

HdTvGaps hdtv_gaps(double tv, double hellinger) {
    const double mid = hellinger * std::sqrt(2.0 - hellinger * hellinger);
    return {mid - tv, std::sqrt(2.0) * hellinger - mid};
}

}  // namespace mixlab
