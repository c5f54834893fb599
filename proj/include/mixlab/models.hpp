#pragma once

#include "mixlab/chain.hpp"
#include "mixlab/family.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mixlab {

// ============================================================================
// Two-state chain K = [[1-a, a], [b, 1-b]]
// ============================================================================

struct TwoStateParams {
    double alpha = 0.5;
    double beta = 0.5;

    void validate() const;
};

MarkovChain two_state_chain(const TwoStateParams& p);

namespace two_state {

double heat00(const TwoStateParams& p, double t);
double l2_sq(const TwoStateParams& p, double t);
double hellinger_sq(const TwoStateParams& p, double t);           // d_2^2 / r(t)
double hellinger_sq_expanded(const TwoStateParams& p, double t);  // 1 - pi0 A - pi1 B
double tv(const TwoStateParams& p, double t);

struct Bracket {
    double lower;
    double upper;
};

// d_2^2 / (4[2 + (a/b) e^{-(a+b)t}]) <= d_H^2 <= d_2^2 / (2 + (a/b) e^{-(a+b)t})
Bracket hellinger_sq_bracket(const TwoStateParams& p, double t);

// Discrete time, start 0.
double tv_discrete(const TwoStateParams& p, long long m);
double hellinger_sq_discrete(const TwoStateParams& p, long long m);

}  // namespace two_state

// f_n(c) in its stable form; DomainError unless n e^c > 1.
double ex2p_fn(double n, double c);
// The same quantity in the direct form (n/2)(2 - sqrt(1+u) - sqrt(1-u)), u = (n e^c)^{-1/2}.
double ex2p_fn_direct(double n, double c);

// Product of n identical two-state chains with equal weights, lumped to the number of
// coordinates in state 1. Distances from the all-zero start coincide with the product ones.
MarkovChain two_state_product_lumped(int n, const TwoStateParams& p);

// ============================================================================
// Cycle, Ehrenfest, lazy path
// ============================================================================

// Nearest-neighbour walk on Z_{n+1}, K(x, x+-1) = 1/2 (for n = 1 both moves land on the other state).
MarkovChain cycle_chain(int n);
MarkovChain ehrenfest_chain(int n);
MarkovChain lazy_path_chain(int n);

Vector binomial_distribution(int n, double p);

struct InterleavedFamily {
    double r;

    double weight(int index) const;  // p_{2k-1} = r^{k-1}, p_{2k} = 1
    MarkovChain chain(int index) const;
    double q(int index) const;
    double q1(int n) const;  // sum_{i<=n} p_{2i-1}
    double q2(int n) const;  // sum_{i<=n} p_{2i}
    // (1/4) q1(n) r^{1-n} n log n
    double predicted_odd_cutoff(int n) const;
    // t_{2n-1} = (1/4) q_{2n-1} r^{1-n} n log n, t_{2n} = (1/4) q_{2n} r^{1-n} n log n
    double predicted_cutoff(int index) const;
};

// Member m is the product of the first m interleaved chains.
FamilySpec interleaved_family(double r);
// Member n is the product of Ehrenfest(1..n) with weights r^{i-1}.
ProductFamily interleaved_odd_family(double r);

// ============================================================================
// Lacoin chain on {0, ..., 2n}
// ============================================================================

struct LacoinParams {
    int n = 2;
    double a = 0.1;
    double b = 0.3;
    double beta_exp = 0.0;

    double b_eff() const;  // b n^{-beta_exp}
    double c() const;      // solved from detailed balance between n and 2n
    double log_c() const;
    void validate() const;  // InadmissibleParams on any transition outside [0,1], n < 2, a >= b
};

MarkovChain lacoin_chain(const LacoinParams& p);
Vector lacoin_stationary_logspace(const LacoinParams& p);

struct LacoinEnvelope {
    double t = 0.0;
    std::optional<double> hd_upper1;  // d_H^2 <= .., t > (n+1)/(1-2a)
    std::optional<double> hd_upper2;  // d_H^2 <= .., t > 2n/(1-2a)
    std::optional<double> hd_lower1;  // d_H^2 >= .., n < t < 2n and the bracketed factor positive
    std::optional<double> tv_lower;   // d_TV >= .., 0 < t < n
};

// Requires beta_exp = 0, a < b, a + b < 1/2 (InadmissibleParams otherwise).
LacoinEnvelope lacoin_bound_envelope(const LacoinParams& p, double t);

// ============================================================================
// Weight schedules and B_n(delta)
// ============================================================================

enum class ScheduleKind { Geometric2, PowerAlpha, LogRatio, Custom };

ScheduleKind parse_schedule(const std::string& name);

struct WeightSchedule {
    ScheduleKind kind = ScheduleKind::Geometric2;
    double alpha = 1.0;             // power-alpha exponent
    std::vector<double> custom;     // custom weights
};

struct ScheduleWeights {
    std::vector<double> p;
    double q = 0.0;
};

ScheduleWeights weight_schedule(const WeightSchedule& schedule, int n);

struct LacoinThreshold {
    double delta = 0.0;
    double B = 0.0;
    double p_hat = 0.0;
    std::size_t count = 0;  // |E_{n,delta}|
};

LacoinThreshold b_n_delta(const std::vector<double>& p, const std::vector<double>& b, double delta);

struct LacoinThresholds {
    std::vector<double> delta_grid;
    std::vector<double> B_values;
    double p_hat = 0.0;
};

LacoinThresholds lacoin_thresholds(const std::vector<double>& p, const std::vector<double>& b,
                                   const std::vector<double>& delta_grid);

// Finite-index rendering of sup{delta in grid : B(delta) == level within tol}, with sup of the
// empty set = 0. An infinite level matches grid points where B(delta) >= tol.
double delta_level(const LacoinThresholds& th, double level, double tol);

}  // namespace mixlab
