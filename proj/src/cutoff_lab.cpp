#include "mixlab/cutoff_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mixlab {

double default_epsilon(Kind kind) {
    switch (kind) {
    case Kind::TV:
        return 0.25;
    case Kind::Hellinger:
        return 0.125;
    default:
        throw Error(ErrorCode::InvalidKind, "default epsilon is defined for tv and hellinger only");
    }
}

namespace {

double product_mixing_time(const ProductSpec& spec, Kind kind, double eps, const MixingOptions& options) {
    spec.validate();
    if (kind == Kind::Hellinger) {
        CoordinateDistances cd(spec, Kind::Hellinger, all_max(spec), options.params);
        auto f = [&](double t) { return combine_hellinger(cd.at(t)); };
        return continuous_crossing(f, eps, options).value;
    }
    if (spec.state_count() > kDenseProductLimit)
        throw Error(ErrorCode::TooLarge, std::string("product ") + kind_name(kind) + " mixing time needs the dense chain");
    MarkovChain dense = dense_product_chain(spec);
    return mixing_time(dense, kind, eps, Start::max(), TimeMode::Continuous, options).value;
}

double epsilon_for(const FamilySpec& family, double eps, int n) {
    if (eps > 0.0) return eps;
    if (!family.epsilon_schedule) throw Error(ErrorCode::InvalidArgument, "no epsilon given and family has no schedule");
    return family.epsilon_schedule(n);
}

std::optional<Start> start_for(const FamilySpec& family, int n) {
    if (family.start) return family.start(n);
    return std::nullopt;
}

double family_time(const FamilySpec& family, Kind kind, double eps, int n, const MixingOptions& options) {
    if (!family.generator) throw Error(ErrorCode::InvalidArgument, "family has no generator");
    FamilyMember member = family.generator(n);
    return member_mixing_time(member, kind, eps, start_for(family, n), options);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

double member_mixing_time(const FamilyMember& member, Kind kind, double eps, const std::optional<Start>& start,
                          const MixingOptions& options) {
    if (const auto* chain = std::get_if<MarkovChain>(&member))
        return mixing_time(*chain, kind, eps, start.value_or(Start::max()), TimeMode::Continuous, options).value;
    return product_mixing_time(std::get<ProductSpec>(member), kind, eps, options);
}

MixingProfile mixing_profile(const FamilySpec& family, Kind kind, double eps, const std::vector<int>& indices,
                             const MixingOptions& options) {
    MixingProfile out;
    out.kind = kind;
    out.epsilon = eps;
    for (int n : indices) {
        try {
            double t = family_time(family, kind, epsilon_for(family, eps, n), n, options);
            out.indices.push_back(n);
            out.times.push_back(t);
        } catch (const Error& e) {
            out.failures.push_back({n, e.code(), e.what()});
        }
    }
    return out;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::ConsistentWithCutoff:
        return "consistent-with-cutoff";
    case Verdict::ConsistentWithNoCutoff:
        return "consistent-with-no-cutoff";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

Verdict cutoff_verdict(const std::vector<double>& ratios, const std::vector<double>& times,
                       const VerdictThresholds& th, TrendSummary& trend) {
    if (ratios.size() != times.size()) throw Error(ErrorCode::DimensionMismatch, "ratios and times differ in length");
    trend = TrendSummary{};
    if (ratios.empty()) {
        trend.rule = "too-few-indices";
        return Verdict::Inconclusive;
    }
    const std::size_t n = ratios.size();
    const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(th.tail, 1)));
    trend.last_ratio = ratios.back();
    trend.tail_mean = std::accumulate(ratios.end() - k, ratios.end(), 0.0) / static_cast<double>(k);
    trend.tail_strictly_decreasing = true;
    trend.tail_max_step = k > 1 ? -std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t i = n - k + 1; i < n; ++i) {
        double step = ratios[i] - ratios[i - 1];
        trend.tail_max_step = std::max(trend.tail_max_step, step);
        if (!(step < 0.0)) trend.tail_strictly_decreasing = false;
    }

    // 1/(1 - 1/r) is T(eps)/window: it grows like a power of log T under a cutoff and stays put otherwise.
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
        if (ratios[i] > 1.0 && times[i] > 0.0) {
            x.push_back(std::log(times[i]));
            y.push_back(1.0 / (1.0 - 1.0 / ratios[i]));
        }
    }
    trend.sharpness_slope = x.size() >= 2 ? slope(x, y) : 0.0;

    if (static_cast<int>(n) < th.min_indices) {
        trend.rule = "too-few-indices";
        return Verdict::Inconclusive;
    }
    bool near_one = true;
    for (std::size_t i = n - k; i < n; ++i)
        if (std::abs(ratios[i] - 1.0) > th.near_one_tol) near_one = false;
    if (near_one && (trend.tail_strictly_decreasing || std::abs(trend.last_ratio - 1.0) <= 1e-12)) {
        trend.rule = "tail-near-one";
        return Verdict::ConsistentWithCutoff;
    }
    if (trend.sharpness_slope >= th.growth_min && ratios.back() < ratios.front()) {
        trend.rule = "window-shrinking";
        return Verdict::ConsistentWithCutoff;
    }
    if (std::abs(trend.sharpness_slope) <= th.flat_max && trend.last_ratio >= 1.0 + th.bounded_away) {
        trend.rule = "ratio-flat-above-one";
        return Verdict::ConsistentWithNoCutoff;
    }
    trend.rule = "no-rule-matched";
    return Verdict::Inconclusive;
}

namespace {

CutoffReport paired_report(const FamilySpec& family, Kind kind, double a, double b, const std::vector<int>& indices,
                           const std::function<double(int)>& reference_window, const VerdictThresholds& th,
                           const MixingOptions& options) {
    // a is the smaller level, so T(a) >= T(b).
    CutoffReport rep;
    rep.thresholds = th;
    for (int n : indices) {
        try {
            double ta = family_time(family, kind, a, n, options);
            double tb = family_time(family, kind, b, n, options);
            rep.indices.push_back(n);
            rep.t_eps.push_back(ta);
            rep.t_delta.push_back(tb);
            rep.ratios.push_back(tb > 0.0 ? ta / tb : std::numeric_limits<double>::infinity());
            double w = std::abs(ta - tb);
            rep.windows.push_back(w);
            double big = std::max(ta, tb);
            rep.relative_windows.push_back(big > 0.0 ? w / big : 0.0);
            if (reference_window) rep.reference.push_back(w / reference_window(n));
        } catch (const Error& e) {
            rep.failures.push_back({n, e.code(), e.what()});
        }
    }
    rep.verdict = cutoff_verdict(rep.ratios, rep.t_eps, th, rep.trend);
    return rep;
}

void require_level(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must lie in (0,1)");
}

}  // namespace

CutoffReport cutoff_ratio_diagnostic(const FamilySpec& family, Kind kind, double eps, double delta,
                                     const std::vector<int>& indices, const VerdictThresholds& th,
                                     const MixingOptions& options) {
    require_level(eps, "eps");
    require_level(delta, "delta");
    if (eps == delta) throw Error(ErrorCode::InvalidArgument, "eps and delta must differ");
    CutoffReport rep = paired_report(family, kind, std::min(eps, delta), std::max(eps, delta), indices, {}, th, options);
    if (eps > delta) {
        // Report in the caller's orientation, verdict stays on the >= 1 orientation.
        std::swap(rep.t_eps, rep.t_delta);
        for (double& r : rep.ratios) r = 1.0 / r;
    }
    return rep;
}

CutoffReport window_diagnostic(const FamilySpec& family, Kind kind, double eps, const std::vector<int>& indices,
                               const std::function<double(int)>& reference_window, const VerdictThresholds& th,
                               const MixingOptions& options) {
    if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorCode::InvalidArgument, "window eps must lie in (0,1/2)");
    return paired_report(family, kind, eps, 1.0 - eps, indices, reference_window, th, options);
}

FnValue f_n_from(const std::vector<double>& d) {
    FnValue out;
    double sum = 0.0, max_sq = 0.0, max_d = 0.0;
    for (double x : d) {
        sum += x * x;
        max_sq = std::max(max_sq, x * x);
        max_d = std::max(max_d, x);
    }
    out.G = max_d;
    if (max_sq >= 1.0) {
        out.F = std::numeric_limits<double>::infinity();
        out.F_infinite = true;
    } else {
        out.F = std::min(sum / (1.0 - max_sq), std::numeric_limits<double>::max());
    }
    return out;
}

FnValue f_n_evaluator(const ProductSpec& spec, double t, const ProductStart& starts, const UniformizationParams& params) {
    CoordinateDistances cd(spec, Kind::Hellinger, starts, params);
    return f_n_from(cd.at(t));
}

FnValue f_n_evaluator(const FamilySpec& family, double t, int n, const std::optional<ProductStart>& starts,
                      const UniformizationParams& params) {
    FamilyMember member = family.generator(n);
    const auto* spec = std::get_if<ProductSpec>(&member);
    if (!spec) throw Error(ErrorCode::InvalidInput, "family member is not a product");
    return f_n_evaluator(*spec, t, starts.value_or(all_max(*spec)), params);
}

RDiagnostic r_estimator(const ProductFamily& family, Kind kind, double c, const std::vector<int>& n_list,
                        const std::vector<int>& m_list, const std::function<double(int, int)>& eps,
                        const MixingOptions& options) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c must be positive");
    const int r = rho(kind);
    RDiagnostic out;
    out.c = c;
    out.kind = kind;
    out.n_list = n_list;
    out.m_list = m_list;
    for (int m : m_list)
        if (m < 0) throw Error(ErrorCode::InvalidArgument, "m must be nonnegative");

    for (int n : n_list) {
        const int k = family.size(n);
        std::vector<double> log_p(k), log_T(k), log_base(k), T(k);
        for (int i = 1; i <= k; ++i) {
            double e = eps ? eps(n, i) : default_epsilon(kind);
            if (!(e > 0.0 && e < 1.0 / (2.0 * r)))
                throw Error(ErrorCode::InvalidArgument, "epsilon outside (0, 1/(2 rho))");
            T[i - 1] = coordinate_mixing_time(family.coordinate(n, i), kind, e, options);
            if (!(T[i - 1] > 0.0)) throw Error(ErrorCode::NonPositiveMixingTime, "coordinate mixing time is zero");
            log_T[i - 1] = std::log(T[i - 1]);
            log_p[i - 1] = family.log_weight(n, i);
            log_base[i - 1] = std::log(2.0 * r * e);
        }
        std::vector<double> log_ratio(k);
        for (int i = 0; i < k; ++i) log_ratio[i] = log_T[i] - log_p[i];
        const double log_s = *std::max_element(log_ratio.begin(), log_ratio.end());

        // The maximising coordinate contributes exactly (2 rho eps)^{c rho}.
        std::vector<double> log_terms(k);
        for (int i = 0; i < k; ++i) log_terms[i] = c * r * std::exp(log_s - log_ratio[i]) * log_base[i];

        std::vector<double> row_S, row_log;
        for (int m : m_list) {
            const int top = k - m;
            double lmax = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < top; ++i) lmax = std::max(lmax, log_terms[i]);
            double log_S = lmax;
            if (top > 0 && std::isfinite(lmax)) {
                double acc = 0.0;
                for (int i = 0; i < top; ++i) acc += std::exp(log_terms[i] - lmax);
                log_S = lmax + std::log(acc);
            }
            row_log.push_back(log_S);
            row_S.push_back(std::exp(log_S));
        }
        out.log_s.push_back(log_s);
        out.S.push_back(std::move(row_S));
        out.log_S.push_back(std::move(row_log));
        out.coordinate_times.push_back(std::move(T));
    }
    return out;
}

DnDecomposition dn_from_times(const std::vector<int>& indices, const std::vector<double>& times,
                              const std::function<double(int)>& log_weight, const std::optional<DnCandidate>& candidate) {
    if (indices.size() != times.size()) throw Error(ErrorCode::DimensionMismatch, "indices and times differ in length");
    DnDecomposition out;
    out.indices = indices;
    out.T = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0) || !std::isfinite(times[k]))
            throw Error(ErrorCode::NonPositiveMixingTime, "mixing time at n=" + std::to_string(indices[k]) + " is not positive");
        out.D.push_back(std::log(times[k]) - log_weight(indices[k]));
    }
    for (std::size_t k = 1; k < out.D.size(); ++k) {
        double inc = out.D[k] - out.D[k - 1];
        out.increments.push_back(inc);
        if (inc < 0.0) {
            out.D_nondecreasing = false;
            out.D_violations.push_back(indices[k]);
        }
    }
    if (!candidate || !candidate->A || !candidate->B) return out;

    out.has_candidate = true;
    out.A_positive_nondecreasing = true;
    out.B_nondecreasing = true;
    double dev = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const int n = indices[k];
        double A = candidate->A(n), B = candidate->B(n);
        out.A_fit.push_back(A);
        out.B_fit.push_back(B);
        double C = out.D[k] - A * n - B;
        if (candidate->C) C -= candidate->C(n);
        out.C_residuals.push_back(C);
        out.C_max_abs = std::max(out.C_max_abs, std::abs(C));
        if (!(A > 0.0)) out.A_positive_nondecreasing = false;
        if (k > 0) {
            if (A < out.A_fit[k - 1]) out.A_positive_nondecreasing = false;
            if (B < out.B_fit[k - 1]) out.B_nondecreasing = false;
        }
        if (candidate->A_limit) dev = std::max(dev, n * std::abs(A - *candidate->A_limit));
    }
    if (candidate->A_limit) out.A_limit_deviation = dev;
    return out;
}

DnDecomposition dn_decomposition(const FamilySpec& family, Kind kind, const std::function<double(int)>& log_weight,
                                 const std::vector<int>& indices, double eps, const std::optional<DnCandidate>& candidate,
                                 const MixingOptions& options) {
    std::vector<double> times;
    for (int n : indices) times.push_back(family_time(family, kind, epsilon_for(family, eps, n), n, options));
    return dn_from_times(indices, times, log_weight, candidate);
}

TwoStatePrediction two_state_product_cutoff_predictor(const std::vector<double>& alphas, const std::vector<double>& betas,
                                                      const std::vector<double>& weights, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    const auto need = static_cast<std::size_t>(n);
    if (alphas.size() < need || betas.size() < need || weights.size() < need)
        throw Error(ErrorCode::DimensionMismatch, "rates and weights must cover indices 1..n");
    for (std::size_t j = 0; j < need; ++j) {
        if (!(weights[j] > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
        if (j > 0 && weights[j] < weights[j - 1])
            throw Error(ErrorCode::MonotonicityViolated, "weights must be nondecreasing");
        if (!(std::min(alphas[j], betas[j]) > 0.0)) throw Error(ErrorCode::DegenerateRates, "alpha and beta must be positive");
    }
    TwoStatePrediction out;
    const int half = (n + 1) / 2;
    double best_t = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double p = weights[j - 1];
        const double l = std::log1p(static_cast<double>(j));
        out.criterion = std::max(out.criterion, l / p);
        if (j == half) out.criterion_half = out.criterion;
        best_t = std::max(best_t, l / (2.0 * p * (alphas[j - 1] + betas[j - 1])));
        out.q_n += p;
    }
    out.has_cutoff_criterion = out.criterion > out.criterion_half * (1.0 + 1e-9);
    out.t_n = out.q_n * best_t;
    out.b_n = std::sqrt(out.t_n * out.q_n);
    return out;
}

LazyComparison lazy_continuous_comparison(const MarkovChain& chain, double theta, Kind kind, double eps,
                                          const MixingOptions& options) {
    if (!(theta >= 0.0 && theta < 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0,1)");
    LazyComparison out;
    MarkovChain lazy = lazify(chain, theta);
    out.discrete = mixing_time(lazy, kind, eps, Start::max(), TimeMode::Discrete, options).value;
    out.continuous_scaled = mixing_time(chain, kind, eps, Start::max(), TimeMode::Continuous, options).value / (1.0 - theta);
    return out;
}

}  // namespace mixlab
