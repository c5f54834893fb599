#include "mixlab/kernel_eval.hpp"

#include "mixlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace mixlab {

void UniformizationParams::validate() const {
    if (!(tail_tol > 0.0 && tail_tol <= 1e-6)) {
        throw Error(ErrorCode::InvalidArgument, "tail_tol must lie in (0, 1e-6]");
    }
    if (max_terms <= 0) throw Error(ErrorCode::InvalidArgument, "max_terms must be positive");
}

PoissonWindow poisson_window(double t, double tail_tol, long long max_terms) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "time must be finite and >= 0");
    PoissonWindow w;
    if (t == 0.0) {
        w.weights = {1.0};
        return w;
    }
    const double half = 0.5 * tail_tol;
    const long long mode = static_cast<long long>(std::floor(t));
    const double wmode = std::exp(-t + static_cast<double>(mode) * std::log(t) - std::lgamma(static_cast<double>(mode) + 1.0));

    // Right side: for m >= M the ratio w_{m+1}/w_m <= t/(M+1) < 1.
    std::vector<double> right{wmode};
    long long m = mode;
    double wm = wmode;
    while (true) {
        const double next = wm * t / static_cast<double>(m + 1);
        const double ratio = t / static_cast<double>(m + 2);
        if (ratio < 1.0 && next / (1.0 - ratio) < half) {
            w.discarded_bound += next / (1.0 - ratio);
            break;
        }
        ++m;
        if (m > max_terms) {
            throw Error(ErrorCode::BudgetExceeded, "uniformization needs more than max_terms terms at t=" + std::to_string(t));
        }
        wm = next;
        right.push_back(wm);
    }

    // Left side: for m <= L the ratio w_{m-1}/w_m = m/t <= L/t < 1.
    std::vector<double> left;
    m = mode;
    wm = wmode;
    while (m > 0) {
        const double prev = wm * static_cast<double>(m) / t;
        const double ratio = static_cast<double>(m - 1) / t;
        if (ratio < 1.0 && prev / (1.0 - ratio) < half) {
            w.discarded_bound += prev / (1.0 - ratio);
            break;
        }
        --m;
        wm = prev;
        left.push_back(wm);
    }
    w.first = m;
    w.weights.assign(left.rbegin(), left.rend());
    w.weights.insert(w.weights.end(), right.begin(), right.end());
    // Normalise to unit mass; the mode weight loses relative accuracy through lgamma at large t.
    double total = 0.0;
    for (double x : w.weights) total += x;
    for (double& x : w.weights) x /= total;
    return w;
}

const Vector& Start::distribution() const {
    if (!mu_) throw Error(ErrorCode::InvalidArgument, "MAX start has no single distribution");
    return *mu_;
}

Propagator::Propagator(const Matrix& kernel, Vector start) : kernel_(&kernel) {
    if (start.size() != kernel.rows()) throw Error(ErrorCode::DimensionMismatch, "start length differs from kernel size");
    powers_.push_back(std::move(start));
}

const Vector& Propagator::power(long long m) {
    while (static_cast<long long>(powers_.size()) <= m) {
        Vector next = kernel_->transpose() * powers_.back();
        powers_.push_back(std::move(next));
    }
    return powers_[static_cast<std::size_t>(m)];
}

Vector Propagator::heat(double t, const UniformizationParams& params) {
    params.validate();
    PoissonWindow w = poisson_window(t, params.tail_tol, params.max_terms);
    power(w.last());
    Vector acc = Vector::Zero(powers_.front().size());
    for (std::size_t j = 0; j < w.weights.size(); ++j) {
        acc.noalias() += w.weights[j] * powers_[static_cast<std::size_t>(w.first) + j];
    }
    const double s = acc.sum();
    if (s > 0.0) acc /= s;
    return acc;
}

Vector heat_kernel_row(const MarkovChain& chain, const Vector& start, double t, const UniformizationParams& params) {
    Propagator prop(chain.kernel(), start);
    return prop.heat(t, params);
}

namespace {

Matrix uniformized_matrix(const Matrix& kernel, double t, double tail_tol, long long max_terms) {
    PoissonWindow w = poisson_window(t, tail_tol, max_terms);
    const Eigen::Index n = kernel.rows();
    Matrix power = Matrix::Identity(n, n);
    Matrix acc = Matrix::Zero(n, n);
    for (long long m = 0; m <= w.last(); ++m) {
        if (m >= w.first) acc.noalias() += w.weights[static_cast<std::size_t>(m - w.first)] * power;
        if (m < w.last()) power = (power * kernel).eval();
    }
    return acc;
}

void normalize_rows(Matrix& m) {
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
        const double s = m.row(x).sum();
        if (s > 0.0) m.row(x) /= s;
    }
}

}  // namespace

Matrix heat_kernel_matrix(const Matrix& kernel, double t, const UniformizationParams& params) {
    params.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "time must be finite and >= 0");
    int k = 0;
    double base = t;
    while (base > 1.0) {
        base *= 0.5;
        ++k;
    }
    Matrix h = uniformized_matrix(kernel, base, std::ldexp(params.tail_tol, -k), params.max_terms);
    for (int j = 0; j < k; ++j) h = (h * h).eval();
    normalize_rows(h);
    return h;
}

double max_row_distance(Kind kind, const Matrix& rows, const Vector& pi) {
    double best = 0.0;
    for (Eigen::Index x = 0; x < rows.rows(); ++x) {
        Vector r = rows.row(x).transpose();
        best = std::max(best, distance(kind, r, pi));
    }
    return best;
}

double distance_at(const MarkovChain& chain, Kind kind, const Vector& start, double t, const UniformizationParams& params) {
    return distance(kind, heat_kernel_row(chain, start, t, params), chain.stationary());
}

double max_distance_at(const MarkovChain& chain, Kind kind, double t, const UniformizationParams& params) {
    return max_row_distance(kind, heat_kernel_matrix(chain.kernel(), t, params), chain.stationary());
}

DistanceEvaluator::DistanceEvaluator(const MarkovChain& chain, Kind kind, Start start, UniformizationParams params)
    : chain_(&chain), kind_(kind), start_(std::move(start)), params_(params) {
    params_.validate();
    if (!start_.is_max()) {
        if (start_.distribution().size() != chain.size()) {
            throw Error(ErrorCode::DimensionMismatch, "start length differs from chain size");
        }
        propagator_.emplace(chain.kernel(), start_.distribution());
    }
}

double DistanceEvaluator::continuous(double t) {
    if (propagator_) return distance(kind_, propagator_->heat(t, params_), chain_->stationary());
    return max_row_distance(kind_, heat_kernel_matrix(chain_->kernel(), t, params_), chain_->stationary());
}

const Matrix& DistanceEvaluator::square(std::size_t j) {
    if (squares_.empty()) squares_.push_back(chain_->kernel());
    while (squares_.size() <= j) squares_.push_back(squares_.back() * squares_.back());
    return squares_[j];
}

double DistanceEvaluator::discrete(long long m) {
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "step count must be nonnegative");
    const Eigen::Index n = chain_->size();
    if (propagator_) {
        Vector v = start_.distribution();
        for (std::size_t j = 0; (m >> j) != 0; ++j) {
            if ((m >> j) & 1LL) v = (square(j).transpose() * v).eval();
        }
        return distance(kind_, v, chain_->stationary());
    }
    Matrix p = Matrix::Identity(n, n);
    for (std::size_t j = 0; (m >> j) != 0; ++j) {
        if ((m >> j) & 1LL) p = (p * square(j)).eval();
    }
    return max_row_distance(kind_, p, chain_->stationary());
}

DistanceCurve distance_curve(const MarkovChain& chain, Kind kind, const Start& start, const std::vector<double>& times,
                             const UniformizationParams& params) {
    DistanceCurve curve;
    curve.kind = kind;
    curve.max_start = start.is_max();
    if (!std::is_sorted(times.begin(), times.end())) throw Error(ErrorCode::InvalidArgument, "time grid must be ascending");
    DistanceEvaluator eval(chain, kind, start, params);
    for (double t : times) {
        curve.times.push_back(t);
        curve.values.push_back(eval.continuous(t));
    }
    return curve;
}

MixingTime continuous_crossing(const std::function<double(double)>& f, double eps, const MixingOptions& options) {
    MixingTime out;
    out.epsilon = eps;
    out.mode = TimeMode::Continuous;
    if (f(0.0) <= eps) return out;
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) > eps) {
        lo = hi;
        hi *= 2.0;
        if (hi > options.horizon) {
            throw Error(ErrorCode::NoUpperBracket, "distance stays above epsilon past the horizon " + std::to_string(options.horizon));
        }
    }
    while (hi - lo > options.rel_resolution * hi) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) <= eps) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.value = hi;
    out.resolution = hi - lo;
    return out;
}

MixingTime mixing_time(const MarkovChain& chain, Kind kind, double eps, const Start& start, TimeMode mode,
                       const MixingOptions& options) {
    if (!(eps > 0.0 && eps < 1.0) && kind != Kind::L2) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    DistanceEvaluator eval(chain, kind, start, options.params);
    if (mode == TimeMode::Continuous) {
        MixingTime out = continuous_crossing([&](double t) { return eval.continuous(t); }, eps, options);
        out.kind = kind;
        return out;
    }
    MixingTime out;
    out.kind = kind;
    out.epsilon = eps;
    out.mode = TimeMode::Discrete;
    out.resolution = 1.0;
    if (eval.discrete(0) <= eps) {
        out.resolution = 0.0;
        return out;
    }
    long long lo = 0;
    long long hi = 1;
    while (eval.discrete(hi) > eps) {
        lo = hi;
        hi *= 2;
        if (hi > options.discrete_horizon) {
            throw Error(ErrorCode::NoUpperBracket, "distance stays above epsilon past the discrete horizon");
        }
    }
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (eval.discrete(mid) <= eps) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.value = static_cast<double>(hi);
    return out;
}

FloorCeil discrete_distance_floor_ceil(const MarkovChain& chain, Kind kind, const Start& start, double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "time must be finite and >= 0");
    DistanceEvaluator eval(chain, kind, start);
    FloorCeil fc;
    fc.floor_step = static_cast<long long>(std::floor(a));
    fc.ceil_step = static_cast<long long>(std::ceil(a));
    fc.at_floor = eval.discrete(fc.floor_step);
    fc.at_ceil = fc.ceil_step == fc.floor_step ? fc.at_floor : eval.discrete(fc.ceil_step);
    return fc;
}

MarkovChain lazify(const MarkovChain& chain, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0,1)");
    const Eigen::Index n = chain.size();
    Matrix k = theta * Matrix::Identity(n, n) + (1.0 - theta) * chain.kernel();
    return MarkovChain::from_kernel(std::move(k), chain.label() + "-lazy", chain.stationary());
}

}  // namespace mixlab
