#pragma once

#include "mixlab/distances.hpp"
#include "mixlab/error.hpp"
#include "mixlab/family.hpp"
#include "mixlab/kernel_eval.hpp"
#include "mixlab/product.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mixlab {

struct FailedIndex {
    int n = 0;
    ErrorCode code = ErrorCode::InvalidArgument;
    std::string message;
};

// Default epsilon for the R(c) and F_n machinery: 1/4 for TV, 1/8 for Hellinger.
double default_epsilon(Kind kind);

// Continuous-time mixing time of one family member. Chains use the given start (MAX when
// absent); products use the structured Hellinger path, or the dense oracle for TV.
double member_mixing_time(const FamilyMember& member, Kind kind, double eps, const std::optional<Start>& start,
                          const MixingOptions& options = {});

struct MixingProfile {
    std::vector<int> indices;
    std::vector<double> times;
    Kind kind = Kind::TV;
    double epsilon = 0.0;
    std::vector<FailedIndex> failures;

    bool partial() const { return !failures.empty(); }
};

// eps <= 0 means "use family.epsilon_schedule".
MixingProfile mixing_profile(const FamilySpec& family, Kind kind, double eps, const std::vector<int>& indices,
                             const MixingOptions& options = {});

enum class Verdict { ConsistentWithCutoff, ConsistentWithNoCutoff, Inconclusive };

const char* verdict_name(Verdict v);

struct VerdictThresholds {
    int min_indices = 4;
    int tail = 3;
    double near_one_tol = 0.05;   // last `tail` ratios within this of 1 and strictly improving
    double growth_min = 0.05;     // cutoff: slope of 1/(1 - 1/ratio) against log T at least this
    double flat_max = 0.02;       // no cutoff: |that slope| at most this
    double bounded_away = 0.20;   // no cutoff: final ratio at least 1 + this
};

struct TrendSummary {
    double last_ratio = 0.0;
    double tail_mean = 0.0;        // mean of the last `tail` ratios
    double tail_max_step = 0.0;    // largest step between consecutive tail ratios (negative = decreasing)
    double sharpness_slope = 0.0;  // least-squares slope of 1/(1 - 1/ratio) against log T_n
    bool tail_strictly_decreasing = false;
    std::string rule;              // which rule produced the verdict
};

struct CutoffReport {
    std::vector<int> indices;
    std::vector<double> t_eps;
    std::vector<double> t_delta;
    std::vector<double> ratios;            // T_n(eps)/T_n(delta)
    std::vector<double> windows;           // |T_n(eps) - T_n(delta)|
    std::vector<double> relative_windows;  // windows / max(T_n(eps), T_n(delta))
    std::vector<double> reference;         // windows / b_n when a reference window is supplied
    TrendSummary trend;
    Verdict verdict = Verdict::Inconclusive;
    VerdictThresholds thresholds;
    std::vector<FailedIndex> failures;
};

// Verdict from per-index ratios (oriented so that ratio >= 1) and mixing times.
Verdict cutoff_verdict(const std::vector<double>& ratios, const std::vector<double>& times,
                       const VerdictThresholds& th, TrendSummary& trend);

CutoffReport cutoff_ratio_diagnostic(const FamilySpec& family, Kind kind, double eps, double delta,
                                     const std::vector<int>& indices, const VerdictThresholds& th = {},
                                     const MixingOptions& options = {});

// Windows |T_n(eps) - T_n(1 - eps)|; reference_window(n) (e.g. b_n) is optional.
CutoffReport window_diagnostic(const FamilySpec& family, Kind kind, double eps, const std::vector<int>& indices,
                               const std::function<double(int)>& reference_window = {},
                               const VerdictThresholds& th = {}, const MixingOptions& options = {});

// F_n(t) and G_n(t) from coordinate Hellinger distances at p_i t / q.
struct FnValue {
    double F = 0.0;
    bool F_infinite = false;  // the 1/0 := infinity convention (max coordinate distance is 1)
    double G = 0.0;
};

FnValue f_n_from(const std::vector<double>& coordinate_hellinger);
FnValue f_n_evaluator(const ProductSpec& spec, double t, const ProductStart& starts,
                      const UniformizationParams& params = {});
FnValue f_n_evaluator(const FamilySpec& family, double t, int n, const std::optional<ProductStart>& starts = {},
                      const UniformizationParams& params = {});

struct RDiagnostic {
    double c = 0.0;
    Kind kind = Kind::TV;
    std::vector<int> n_list;
    std::vector<int> m_list;
    std::vector<double> log_s;                    // log s_n
    std::vector<std::vector<double>> S;           // S[n][m]
    std::vector<std::vector<double>> log_S;       // log S[n][m], -inf for an empty sum
    std::vector<std::vector<double>> coordinate_times;  // T_{n,i}(eps_{n,i})
};

// eps(n, i) defaults to default_epsilon(kind) when empty.
RDiagnostic r_estimator(const ProductFamily& family, Kind kind, double c, const std::vector<int>& n_list,
                        const std::vector<int>& m_list, const std::function<double(int, int)>& eps = {},
                        const MixingOptions& options = {});

struct DnCandidate {
    std::function<double(int)> A;
    std::function<double(int)> B;
    std::function<double(int)> C;  // optional
    std::optional<double> A_limit;  // for the alternative "n |A_n - A| bounded"
};

struct DnDecomposition {
    std::vector<int> indices;
    std::vector<double> T;
    std::vector<double> D;           // log T_n - log p_n
    std::vector<double> increments;  // D_{k+1} - D_k
    bool D_nondecreasing = true;
    std::vector<int> D_violations;   // indices n where D drops

    bool has_candidate = false;
    std::vector<double> A_fit;
    std::vector<double> B_fit;
    std::vector<double> C_residuals;  // D_n - A_n n - B_n (minus C_n if supplied)
    bool A_positive_nondecreasing = false;
    std::optional<double> A_limit_deviation;  // max n |A_n - A|
    bool B_nondecreasing = false;
    double C_max_abs = 0.0;
};

// D_n for a family with log weights log p_n; eps <= 0 uses family.epsilon_schedule.
DnDecomposition dn_decomposition(const FamilySpec& family, Kind kind, const std::function<double(int)>& log_weight,
                                 const std::vector<int>& indices, double eps,
                                 const std::optional<DnCandidate>& candidate = {}, const MixingOptions& options = {});
DnDecomposition dn_from_times(const std::vector<int>& indices, const std::vector<double>& times,
                              const std::function<double(int)>& log_weight,
                              const std::optional<DnCandidate>& candidate = {});

struct TwoStatePrediction {
    double criterion = 0.0;          // max_{j<=n} log(1+j)/p_j
    double criterion_half = 0.0;     // same quantity at ceil(n/2)
    bool has_cutoff_criterion = false;  // criterion still growing over the second half of indices
    double t_n = 0.0;
    double b_n = 0.0;
    double q_n = 0.0;
};

TwoStatePrediction two_state_product_cutoff_predictor(const std::vector<double>& alphas, const std::vector<double>& betas,
                                                      const std::vector<double>& weights, int n);

// Lazified discrete family against the continuous family rescaled by 1/(1 - theta).
struct LazyComparison {
    double discrete = 0.0;
    double continuous_scaled = 0.0;
    double sqrt_t_over_window = 0.0;  // filled by callers that know a window
};

LazyComparison lazy_continuous_comparison(const MarkovChain& chain, double theta, Kind kind, double eps,
                                          const MixingOptions& options = {});

}  // namespace mixlab
