#pragma once

#include "mixlab/chain.hpp"
#include "mixlab/distances.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mixlab {

struct UniformizationParams {
    double tail_tol = 1e-12;
    long long max_terms = 50'000'000;

    // Throws InvalidArgument unless 0 < tail_tol <= 1e-6 and max_terms > 0.
    void validate() const;
};

// Poisson(t) weights for m = first, first+1, ... whose discarded mass on both sides is
// below tail_tol (bounded through the ratio-test remainder).
struct PoissonWindow {
    long long first = 0;
    std::vector<double> weights;
    double discarded_bound = 0.0;

    long long last() const { return first + static_cast<long long>(weights.size()) - 1; }
};

PoissonWindow poisson_window(double t, double tail_tol, long long max_terms);

// Start distribution, or the maximum over all point-mass starts.
class Start {
public:
    static Start max() { return Start(); }
    static Start from(Vector mu) { return Start(std::move(mu)); }
    static Start state(Eigen::Index n, Eigen::Index x) { return Start(point_mass(n, x)); }

    bool is_max() const { return !mu_.has_value(); }
    const Vector& distribution() const;

private:
    Start() = default;
    explicit Start(Vector mu) : mu_(std::move(mu)) {}

    std::optional<Vector> mu_;
};

// Cached sequence mu K^m; heat-kernel evaluations from one start reuse it.
class Propagator {
public:
    Propagator(const Matrix& kernel, Vector start);

    const Vector& power(long long m);
    Vector heat(double t, const UniformizationParams& params);

private:
    const Matrix* kernel_;
    std::vector<Vector> powers_;
};

Vector heat_kernel_row(const MarkovChain& chain, const Vector& start, double t,
                       const UniformizationParams& params = {});

// Full H_t. Uniformization at t / 2^k (k chosen so the base time is at most 1) followed by k
// squarings; the base tail tolerance is divided by 2^k so the total stays below tail_tol.
Matrix heat_kernel_matrix(const Matrix& kernel, double t, const UniformizationParams& params = {});

double distance_at(const MarkovChain& chain, Kind kind, const Vector& start, double t,
                   const UniformizationParams& params = {});
double max_distance_at(const MarkovChain& chain, Kind kind, double t, const UniformizationParams& params = {});

// Distances of each row of a (sub)stochastic matrix to pi, maximised over rows.
double max_row_distance(Kind kind, const Matrix& rows, const Vector& pi);

// Evaluates one distance against the chain's stationary law at arbitrary times, with caching
// appropriate to the start (propagator for fixed starts, matrix path for MAX).
class DistanceEvaluator {
public:
    DistanceEvaluator(const MarkovChain& chain, Kind kind, Start start, UniformizationParams params = {});

    double continuous(double t);
    double discrete(long long m);
    const MarkovChain& chain() const { return *chain_; }

private:
    const MarkovChain* chain_;
    Kind kind_;
    Start start_;
    UniformizationParams params_;
    std::optional<Propagator> propagator_;
    std::vector<Matrix> squares_;  // K^(2^j)
    const Matrix& square(std::size_t j);
};

struct DistanceCurve {
    std::vector<double> times;
    std::vector<double> values;
    Kind kind;
    bool max_start = false;
};

DistanceCurve distance_curve(const MarkovChain& chain, Kind kind, const Start& start, const std::vector<double>& times,
                             const UniformizationParams& params = {});

enum class TimeMode { Continuous, Discrete };

struct MixingOptions {
    UniformizationParams params;
    double rel_resolution = 1e-6;
    double horizon = 1e8;            // continuous time
    long long discrete_horizon = 1LL << 40;
};

struct MixingTime {
    double value = 0.0;
    Kind kind = Kind::TV;
    double epsilon = 0.0;
    double resolution = 0.0;  // continuous: d(value - resolution) > epsilon when value > 0
    TimeMode mode = TimeMode::Continuous;
};

// Smallest t (to relative resolution) with f(t) <= eps, for non-increasing f; returns
// the infimum-side bracket endpoint. Throws NoUpperBracket past the horizon.
MixingTime continuous_crossing(const std::function<double(double)>& f, double eps, const MixingOptions& options);

MixingTime mixing_time(const MarkovChain& chain, Kind kind, double eps, const Start& start, TimeMode mode,
                       const MixingOptions& options = {});

struct FloorCeil {
    long long floor_step;
    long long ceil_step;
    double at_floor;
    double at_ceil;
};

// Discrete-time distance at a real time a, reported at both floor(a) and ceil(a).
FloorCeil discrete_distance_floor_ceil(const MarkovChain& chain, Kind kind, const Start& start, double a);

MarkovChain lazify(const MarkovChain& chain, double theta);

}  // namespace mixlab
