#include "mixlab/models.hpp"

#include "mixlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixlab {

// ============================================================================
// Two-state
// ============================================================================

void TwoStateParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "two-state rates must lie in (0,1]");
    }
}

MarkovChain two_state_chain(const TwoStateParams& p) {
    p.validate();
    Matrix k(2, 2);
    k << 1.0 - p.alpha, p.alpha, p.beta, 1.0 - p.beta;
    Vector pi(2);
    pi << p.beta / (p.alpha + p.beta), p.alpha / (p.alpha + p.beta);
    return MarkovChain::from_kernel(std::move(k), "two-state", pi);
}

namespace two_state {

namespace {

// Hellinger^2 from state 0 when the 0-row is (pi0 + pi1 x, pi1 (1 - x)).
double hellinger_sq_at(const TwoStateParams& p, double x, double one_minus_x) {
    const double ratio = p.alpha / p.beta;
    const double a = std::sqrt(1.0 + ratio * x);
    const double b = std::sqrt(std::max(0.0, one_minus_x));
    const double r = (1.0 + a) * (1.0 + b) * (a + b);
    return ratio * x * x / r;
}

}  // namespace

double heat00(const TwoStateParams& p, double t) {
    const double s = p.alpha + p.beta;
    return p.beta / s + p.alpha / s * std::exp(-s * t);
}

double l2_sq(const TwoStateParams& p, double t) {
    return p.alpha / p.beta * std::exp(-2.0 * (p.alpha + p.beta) * t);
}

double hellinger_sq(const TwoStateParams& p, double t) {
    const double s = p.alpha + p.beta;
    return hellinger_sq_at(p, std::exp(-s * t), -std::expm1(-s * t));
}

double hellinger_sq_expanded(const TwoStateParams& p, double t) {
    const double s = p.alpha + p.beta;
    const double x = std::exp(-s * t);
    return 1.0 - p.beta / s * std::sqrt(1.0 + p.alpha / p.beta * x) - p.alpha / s * std::sqrt(1.0 - x);
}

double tv(const TwoStateParams& p, double t) {
    const double s = p.alpha + p.beta;
    return p.alpha / s * std::exp(-s * t);
}

Bracket hellinger_sq_bracket(const TwoStateParams& p, double t) {
    const double s = p.alpha + p.beta;
    const double denom = 2.0 + p.alpha / p.beta * std::exp(-s * t);
    const double d2 = l2_sq(p, t);
    return {d2 / (4.0 * denom), d2 / denom};
}

double tv_discrete(const TwoStateParams& p, long long m) {
    const double s = p.alpha + p.beta;
    return p.alpha / s * std::pow(std::abs(1.0 - s), static_cast<double>(m));
}

double hellinger_sq_discrete(const TwoStateParams& p, long long m) {
    const double x = std::pow(1.0 - p.alpha - p.beta, static_cast<double>(m));
    return hellinger_sq_at(p, x, 1.0 - x);
}

}  // namespace two_state

double ex2p_fn(double n, double c) {
    const double nec = n * std::exp(c);
    if (!(nec > 1.0)) throw Error(ErrorCode::DomainError, "f_n(c) needs n e^c > 1");
    const double s = std::sqrt(1.0 - 1.0 / nec);
    return std::exp(-c) / ((2.0 + std::sqrt(2.0 + 2.0 * s)) * (1.0 + s));
}

double ex2p_fn_direct(double n, double c) {
    const double nec = n * std::exp(c);
    if (!(nec > 1.0)) throw Error(ErrorCode::DomainError, "f_n(c) needs n e^c > 1");
    const double u = 1.0 / std::sqrt(nec);
    return 0.5 * n * (2.0 - std::sqrt(1.0 + u) - std::sqrt(1.0 - u));
}

Vector binomial_distribution(int n, double p) {
    if (n < 0 || !(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "binomial needs n >= 0 and p in (0,1)");
    Vector out(n + 1);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (int k = 0; k <= n; ++k) {
        out[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq);
    }
    return out / out.sum();
}

MarkovChain two_state_product_lumped(int n, const TwoStateParams& p) {
    p.validate();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "product size must be positive");
    Matrix k = Matrix::Zero(n + 1, n + 1);
    for (int j = 0; j <= n; ++j) {
        const double up = j < n ? (n - j) * p.alpha / n : 0.0;
        const double down = j > 0 ? j * p.beta / n : 0.0;
        if (j < n) k(j, j + 1) = up;
        if (j > 0) k(j, j - 1) = down;
        k(j, j) = 1.0 - up - down;
    }
    return MarkovChain::from_kernel(std::move(k), "two-state-product-lumped",
                                    binomial_distribution(n, p.alpha / (p.alpha + p.beta)));
}

// ============================================================================
// Cycle, Ehrenfest, lazy path
// ============================================================================

MarkovChain cycle_chain(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "cycle index must be >= 1");
    const int size = n + 1;
    Matrix k = Matrix::Zero(size, size);
    for (int x = 0; x < size; ++x) {
        k(x, (x + 1) % size) += 0.5;
        k(x, (x + size - 1) % size) += 0.5;
    }
    return MarkovChain::from_kernel(std::move(k), "cycle", Vector::Constant(size, 1.0 / size));
}

MarkovChain ehrenfest_chain(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "Ehrenfest size must be >= 1");
    Matrix k = Matrix::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) {
        k(j, j + 1) = static_cast<double>(n - j) / n;
        k(j + 1, j) = static_cast<double>(j + 1) / n;
    }
    return MarkovChain::from_kernel(std::move(k), "ehrenfest", binomial_distribution(n, 0.5));
}

MarkovChain lazy_path_chain(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "lazy path size must be >= 1");
    Matrix k = Matrix::Zero(n + 1, n + 1);
    for (int j = 0; j < n; ++j) {
        k(j, j + 1) = 0.5;
        k(j + 1, j) = 0.5;
    }
    k(0, 0) = 0.5;
    k(n, n) = 0.5;
    return MarkovChain::from_kernel(std::move(k), "lazy-path", Vector::Constant(n + 1, 1.0 / (n + 1)));
}

double InterleavedFamily::weight(int index) const {
    if (index < 1) throw Error(ErrorCode::InvalidArgument, "family index must be >= 1");
    if (index % 2 == 0) return 1.0;
    return std::pow(r, (index + 1) / 2 - 1);
}

MarkovChain InterleavedFamily::chain(int index) const {
    if (index < 1) throw Error(ErrorCode::InvalidArgument, "family index must be >= 1");
    return index % 2 == 1 ? ehrenfest_chain((index + 1) / 2) : lazy_path_chain(index / 2);
}

double InterleavedFamily::q(int index) const {
    double s = 0.0;
    for (int i = 1; i <= index; ++i) s += weight(i);
    return s;
}

double InterleavedFamily::q1(int n) const {
    double s = 0.0;
    for (int i = 1; i <= n; ++i) s += std::pow(r, i - 1);
    return s;
}

double InterleavedFamily::q2(int n) const { return static_cast<double>(std::max(n, 0)); }

double InterleavedFamily::predicted_odd_cutoff(int n) const {
    return 0.25 * q1(n) * std::pow(r, 1 - n) * n * std::log(static_cast<double>(n));
}

double InterleavedFamily::predicted_cutoff(int index) const {
    const int n = (index + 1) / 2;
    return 0.25 * q(index) * std::pow(r, 1 - n) * n * std::log(static_cast<double>(n));
}

FamilySpec interleaved_family(double r) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidArgument, "r must lie in (0,1)");
    InterleavedFamily fam{r};
    FamilySpec spec;
    spec.label = "interleaved";
    spec.generator = [fam](int m) -> FamilyMember {
        ProductSpec ps;
        for (int i = 1; i <= m; ++i) {
            ps.coords.push_back(fam.chain(i));
            ps.weights.push_back(fam.weight(i));
        }
        return ps;
    };
    return spec;
}

ProductFamily interleaved_odd_family(double r) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidArgument, "r must lie in (0,1)");
    ProductFamily fam;
    fam.label = "interleaved-odd";
    fam.size = [](int n) { return n; };
    fam.coordinate = [](int, int i) { return ehrenfest_chain(i); };
    fam.log_weight = [r](int, int i) { return (i - 1) * std::log(r); };
    return fam;
}

ProductSpec ProductFamily::spec(int n) const {
    const int k = size(n);
    if (k < 1) throw Error(ErrorCode::InvalidInput, "product family row is empty");
    std::vector<double> logs(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) logs[static_cast<std::size_t>(i - 1)] = log_weight(n, i);
    const double top = *std::max_element(logs.begin(), logs.end());
    ProductSpec ps;
    for (int i = 1; i <= k; ++i) {
        const double w = std::exp(logs[static_cast<std::size_t>(i - 1)] - top);
        if (!(w > std::numeric_limits<double>::min())) {
            throw Error(ErrorCode::InvalidInput, "relative weight underflows double precision");
        }
        ps.coords.push_back(coordinate(n, i));
        ps.weights.push_back(w);
    }
    return ps;
}

// ============================================================================
// Lacoin chain
// ============================================================================

double LacoinParams::b_eff() const { return b * std::pow(static_cast<double>(n), -beta_exp); }

double LacoinParams::log_c() const {
    const double be = b_eff();
    return n * std::log(a) + std::log(1.0 - a - be) - std::log(be) - (n - 1) * std::log1p(-a);
}

double LacoinParams::c() const {
    if (1.0 - a - b_eff() <= 0.0) return 0.0;
    return std::exp(log_c());
}

void LacoinParams::validate() const {
    if (n < 2) throw Error(ErrorCode::InadmissibleParams, "Lacoin chain needs n >= 2");
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InadmissibleParams, "a must lie in (0,1)");
    if (!(beta_exp >= 0.0)) throw Error(ErrorCode::InadmissibleParams, "beta exponent must be >= 0");
    if (!(a < b)) throw Error(ErrorCode::InadmissibleParams, "a < b is required");
    const double be = b_eff();
    if (!(be > 0.0 && 1.0 - a - be >= 0.0)) {
        throw Error(ErrorCode::InadmissibleParams, "transition n -> 2n leaves [0,1]");
    }
    const double cc = c();
    if (!(cc >= 0.0 && 1.0 - a - cc >= 0.0)) throw Error(ErrorCode::InadmissibleParams, "transition 2n -> n leaves [0,1]");
}

Vector lacoin_stationary_logspace(const LacoinParams& p) {
    p.validate();
    const int n = p.n;
    const double la = std::log(p.a);
    const double l1a = std::log1p(-p.a);
    const double lb = std::log(p.b_eff());
    Vector lr(2 * n + 1);
    for (int i = 0; i <= 2 * n; ++i) {
        lr[i] = i <= n ? i * (l1a - la) : (i - 1) * l1a + lb - i * la;
    }
    const double top = lr.maxCoeff();
    Vector pi = (lr.array() - top).exp().matrix();
    return pi / pi.sum();
}

MarkovChain lacoin_chain(const LacoinParams& p) {
    p.validate();
    const int n = p.n;
    const int size = 2 * n + 1;
    const double a = p.a;
    const double be = p.b_eff();
    const double c = p.c();
    Matrix k = Matrix::Zero(size, size);
    k(0, 0) = a;
    for (int j = 0; j < 2 * n; ++j) {
        if (j != n) k(j, j + 1) = 1.0 - a;
        if (j >= 1) k(j, j - 1) = a;
    }
    k(n, n + 1) = be;
    k(n, 2 * n) += 1.0 - a - be;
    k(2 * n, 2 * n - 1) = a;
    k(2 * n, n) += c;
    k(2 * n, 2 * n) = 1.0 - a - c;

    Vector pi = lacoin_stationary_logspace(p);
    Vector solved = stationary_distribution(k);
    for (int i = 0; i < size; ++i) {
        if (pi[i] > 1e-280 && std::abs(solved[i] - pi[i]) > 1e-8 * pi[i]) {
            throw Error(ErrorCode::NoConvergence, "log-space and linear-solve stationary vectors disagree");
        }
    }
    return MarkovChain::from_kernel(std::move(k), "lacoin", pi);
}

LacoinEnvelope lacoin_bound_envelope(const LacoinParams& p, double t) {
    p.validate();
    if (p.beta_exp != 0.0) throw Error(ErrorCode::InadmissibleParams, "the envelope is stated for beta exponent 0");
    if (!(p.a + p.b < 0.5)) throw Error(ErrorCode::InadmissibleParams, "the envelope needs a + b < 1/2");
    const double n = p.n;
    const double a = p.a;
    const double b = p.b;
    // e^{-t} (t e / m)^m sqrt(m), in log space.
    auto log_poisson_tail = [t](double m) { return -t + m * (std::log(t) + 1.0 - std::log(m)) + 0.5 * std::log(m); };

    LacoinEnvelope env;
    env.t = t;
    if (!(t > 0.0)) return env;
    const double s = 1.0 - 2.0 * a;
    if (t > (n + 1.0) / s) {
        env.hd_upper1 = 2.0 * a * t + b + std::exp(log_poisson_tail(n + 1.0)) / (s * t - (n + 1.0));
    }
    if (t > 2.0 * n / s) {
        env.hd_upper2 = 2.0 * a * t + std::exp(log_poisson_tail(2.0 * n)) / (s * t - 2.0 * n);
    }
    if (t > n && t < 2.0 * n) {
        const double x = std::exp(log_poisson_tail(2.0 * n)) / (2.0 * n - t);
        if (x < 1.0) {
            env.hd_lower1 = 0.5 * (a + std::pow(1.0 - a, 2.0 * n) * b * (1.0 - x)) -
                            std::sqrt(a * b) * std::pow(1.0 - a, n) * std::sqrt(1.0 - x);
        }
    }
    if (t < n) {
        env.tv_lower = 1.0 - 2.0 * a - std::exp(log_poisson_tail(n)) / (n - t);
    }
    return env;
}

// ============================================================================
// Weight schedules and B_n(delta)
// ============================================================================

ScheduleKind parse_schedule(const std::string& name) {
    if (name == "geometric-2") return ScheduleKind::Geometric2;
    if (name == "power-alpha") return ScheduleKind::PowerAlpha;
    if (name == "log-ratio") return ScheduleKind::LogRatio;
    if (name == "custom") return ScheduleKind::Custom;
    throw Error(ErrorCode::UnknownSchedule, "unknown weight schedule '" + name + "'");
}

ScheduleWeights weight_schedule(const WeightSchedule& schedule, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "schedule length must be >= 1");
    ScheduleWeights out;
    out.p.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        double v = 0.0;
        switch (schedule.kind) {
            case ScheduleKind::Geometric2: v = 1.0 + std::ldexp(1.0, i - n); break;
            case ScheduleKind::PowerAlpha: v = 1.0 + std::pow(static_cast<double>(i) / n, schedule.alpha); break;
            case ScheduleKind::LogRatio: v = n == 1 ? 1.0 : 1.0 + std::log(static_cast<double>(i)) / std::log(static_cast<double>(n)); break;
            case ScheduleKind::Custom:
                if (schedule.custom.size() != static_cast<std::size_t>(n)) {
                    throw Error(ErrorCode::InvalidArgument, "custom schedule length differs from n");
                }
                v = schedule.custom[static_cast<std::size_t>(i - 1)];
                if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "custom weights must be positive");
                break;
        }
        out.p[static_cast<std::size_t>(i - 1)] = v;
        out.q += v;
    }
    return out;
}

LacoinThreshold b_n_delta(const std::vector<double>& p, const std::vector<double>& b, double delta) {
    if (p.empty() || p.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "weights and b need equal nonzero length");
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
    LacoinThreshold out;
    out.delta = delta;
    out.p_hat = *std::min_element(p.begin(), p.end());
    if (!(out.p_hat > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
    const double cut = (1.0 + delta) * out.p_hat;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < cut) {
            out.B += b[i];
            ++out.count;
        }
    }
    return out;
}

LacoinThresholds lacoin_thresholds(const std::vector<double>& p, const std::vector<double>& b,
                                   const std::vector<double>& delta_grid) {
    LacoinThresholds out;
    out.delta_grid = delta_grid;
    std::sort(out.delta_grid.begin(), out.delta_grid.end());
    for (double d : out.delta_grid) {
        LacoinThreshold th = b_n_delta(p, b, d);
        out.B_values.push_back(th.B);
        out.p_hat = th.p_hat;
    }
    return out;
}

double delta_level(const LacoinThresholds& th, double level, double tol) {
    double best = 0.0;
    for (std::size_t i = 0; i < th.delta_grid.size(); ++i) {
        const bool hit = std::isinf(level) ? th.B_values[i] >= tol : std::abs(th.B_values[i] - level) <= tol;
        if (hit) best = std::max(best, th.delta_grid[i]);
    }
    return best;
}

}  // namespace mixlab
