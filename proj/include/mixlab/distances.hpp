#pragma once

#include "mixlab/chain.hpp"

#include <string>
#include <string_view>

namespace mixlab {

enum class Kind { TV, Hellinger, L2 };

// The exponent rho: 1 for TV, 2 for Hellinger. Throws InvalidKind for L2.
int rho(Kind kind);

const char* kind_name(Kind kind);
Kind parse_kind(std::string_view text);

double tv_distance(const Vector& mu, const Vector& nu);
double hellinger_distance(const Vector& mu, const Vector& nu);
double l2_distance(const Vector& mu, const Vector& pi);
double distance(Kind kind, const Vector& mu, const Vector& pi);

struct SandwichGaps {
    double lower_gap;  // d_H^2 - (1 - sqrt(1 - d_TV^2))
    double upper_gap;  // d_TV - d_H^2
};

SandwichGaps sandwich_check(const Vector& mu, const Vector& nu);
SandwichGaps sandwich_gaps(double tv, double hellinger);

struct HdTvGaps {
    double first;   // d_H sqrt(2 - d_H^2) - d_TV
    double second;  // sqrt(2) d_H - d_H sqrt(2 - d_H^2)
};

HdTvGaps hdtv_gaps(double tv, double hellinger);

}  // namespace mixlab
