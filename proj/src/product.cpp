#include "mixlab/product.hpp"

#include "mixlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <string_view>
#include <tuple>

namespace mixlab {

double ProductSpec::q() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double ProductSpec::coordinate_time(std::size_t i, double t) const { return weights.at(i) * t / q(); }

double ProductSpec::state_count() const {
    double n = 1.0;
    for (const auto& c : coords) n *= static_cast<double>(c.size());
    return n;
}

void ProductSpec::validate() const {
    if (coords.empty()) throw Error(ErrorCode::InvalidInput, "product needs at least one coordinate");
    if (weights.size() != coords.size()) throw Error(ErrorCode::InvalidInput, "one weight per coordinate is required");
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidInput, "product weights must be positive and finite");
    }
}

ProductStart all_max(const ProductSpec& spec) { return ProductStart(spec.size(), Start::max()); }

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector kronecker(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

namespace {

void require_oracle_size(const ProductSpec& spec) {
    if (spec.state_count() > kDenseProductLimit) {
        throw Error(ErrorCode::TooLarge, "dense product would have more than 1e4 states");
    }
}

void require_starts(const ProductSpec& spec, const ProductStart& starts) {
    if (starts.size() != spec.size()) throw Error(ErrorCode::DimensionMismatch, "one start per coordinate is required");
}

}  // namespace

MarkovChain dense_product_chain(const ProductSpec& spec) {
    spec.validate();
    require_oracle_size(spec);
    const double q = spec.q();
    const auto n = static_cast<Eigen::Index>(spec.state_count());
    Matrix k = Matrix::Zero(n, n);
    Vector pi = Vector::Ones(1);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        Matrix term = Matrix::Identity(1, 1);
        for (std::size_t j = 0; j < spec.size(); ++j) {
            const Eigen::Index nj = spec.coords[j].size();
            term = kronecker(term, j == i ? spec.coords[j].kernel() : Matrix(Matrix::Identity(nj, nj)));
        }
        k += (spec.weights[i] / q) * term;
        pi = kronecker(pi, spec.coords[i].stationary());
    }
    std::string label = "product";
    for (const auto& c : spec.coords) label += ":" + c.label();
    return MarkovChain::from_kernel(std::move(k), label, pi);
}

Matrix product_heat_kernel_tensor(const ProductSpec& spec, double t, const UniformizationParams& params) {
    spec.validate();
    require_oracle_size(spec);
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out = kronecker(out, heat_kernel_matrix(spec.coords[i].kernel(), spec.coordinate_time(i, t), params));
    }
    return out;
}

CoordinateDistances::CoordinateDistances(const ProductSpec& spec, Kind kind, const ProductStart& starts,
                                         const UniformizationParams& params)
    : spec_(&spec), kind_(kind) {
    spec.validate();
    require_starts(spec, starts);
    evals_.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) evals_.emplace_back(spec.coords[i], kind, starts[i], params);
}

std::vector<double> CoordinateDistances::at(double t) {
    std::vector<double> d(evals_.size());
    for (std::size_t i = 0; i < evals_.size(); ++i) d[i] = evals_[i].continuous(spec_->coordinate_time(i, t));
    return d;
}

double combine_hellinger(const std::vector<double>& d) {
    // 1 - prod(1 - d_i^2) = -expm1(sum log1p(-d_i^2)). For MAX starts each factor is
    // maximised separately: the map is increasing in every d_i and point masses on the
    // product space are products of coordinate point masses, so the two maxima coincide.
    double log_prod = 0.0;
    for (double di : d) log_prod += std::log1p(-std::min(1.0, di * di));
    return std::sqrt(std::clamp(-std::expm1(log_prod), 0.0, 1.0));
}

double product_hellinger_exact(const ProductSpec& spec, double t, const ProductStart& starts,
                               const UniformizationParams& params) {
    CoordinateDistances cd(spec, Kind::Hellinger, starts, params);
    return combine_hellinger(cd.at(t));
}

BoundBracket tv_bracket_from(const std::vector<double>& d) {
    double log_sq = 0.0;
    double log_lin = 0.0;
    double dmax = 0.0;
    for (double di : d) {
        const double x = std::clamp(di, 0.0, 1.0);
        log_sq += 0.5 * std::log1p(-x * x);
        log_lin += std::log1p(-x);
        dmax = std::max(dmax, x);
    }
    BoundBracket b;
    b.kind = Kind::TV;
    b.lower = std::max(-std::expm1(log_sq), dmax);
    b.upper = std::max(-std::expm1(log_lin), b.lower);
    b.source = "coordinate TV bracket";
    return b;
}

BoundBracket product_tv_bracket(const ProductSpec& spec, double t, const ProductStart& starts,
                                const UniformizationParams& params) {
    CoordinateDistances cd(spec, Kind::TV, starts, params);
    return tv_bracket_from(cd.at(t));
}

double dense_product_distance(const ProductSpec& spec, Kind kind, double t, const ProductStart& starts,
                              const UniformizationParams& params) {
    require_starts(spec, starts);
    MarkovChain dense = dense_product_chain(spec);
    const bool any_max = std::any_of(starts.begin(), starts.end(), [](const Start& s) { return s.is_max(); });
    const bool all_max_slots = std::all_of(starts.begin(), starts.end(), [](const Start& s) { return s.is_max(); });
    if (any_max && !all_max_slots) {
        throw Error(ErrorCode::InvalidArgument, "dense oracle needs either all fixed starts or all MAX");
    }
    if (all_max_slots) return max_distance_at(dense, kind, t, params);
    Vector mu = Vector::Ones(1);
    for (const auto& s : starts) mu = kronecker(mu, s.distribution());
    return distance_at(dense, kind, mu, t, params);
}

ProdMixingBounds prodmixing_from(const std::vector<double>& d, Kind kind) {
    const int r = rho(kind);
    ProdMixingBounds out;
    out.rho = r;
    double sum_ratio = 0.0;
    double sum_sq = 0.0;
    double max_pow = 0.0;
    for (double di : d) {
        const double x = std::clamp(di, 0.0, 1.0);
        const double xr = r == 1 ? x : x * x;
        sum_ratio += xr >= 1.0 ? HUGE_VAL : xr / (1.0 - xr);
        sum_sq += x * x;
        max_pow = std::max(max_pow, xr);
    }
    out.exp_branch = -std::expm1(-0.5 * r * sum_sq);
    out.max_branch = max_pow;
    out.bracket.kind = kind;
    out.bracket.lower = std::max(out.exp_branch, out.max_branch);
    out.bracket.upper = std::max(-std::expm1(-sum_ratio), out.bracket.lower);
    out.bracket.source = "product exponential bracket (d^rho scale)";
    return out;
}

ProdMixingBounds prodmixing_bounds(const ProductSpec& spec, double t, Kind kind, const ProductStart& starts,
                                   const ProdMixingOptions& options) {
    if (kind == Kind::L2) throw Error(ErrorCode::InvalidKind, "product bounds cover TV and Hellinger only");
    CoordinateDistances cd(spec, kind, starts, options.mixing.params);
    const std::vector<double> d = cd.at(t);
    ProdMixingBounds out = prodmixing_from(d, kind);
    if (options.A) {
        const double a = *options.A;
        if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "A must lie in (0,1)");
        const double level = std::pow(a, 1.0 / out.rho);
        double t_star = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            double ti = starts[i].is_max()
                            ? coordinate_mixing_time(spec.coords[i], kind, level, options.mixing)
                            : mixing_time(spec.coords[i], kind, level, starts[i], TimeMode::Continuous, options.mixing).value;
            t_star = std::max(t_star, ti * spec.q() / spec.weights[i]);
        }
        out.t_star = t_star;
        if (t >= t_star) {
            double s = 0.0;
            for (double di : d) s += out.rho == 1 ? di : di * di;
            out.simplified_upper = -std::expm1(-s / (1.0 - a));
        }
    }
    return out;
}

double sum_bound(const ProductSpec& spec, double t, Kind kind, const ProductStart& starts,
                 const UniformizationParams& params) {
    if (kind == Kind::L2) throw Error(ErrorCode::InvalidKind, "sum bound covers TV and Hellinger only");
    CoordinateDistances cd(spec, kind, starts, params);
    double s = 0.0;
    for (double di : cd.at(t)) s += kind == Kind::TV ? di : di * di;
    return s;
}

namespace {

using CacheKey = std::tuple<std::size_t, Eigen::Index, int, double>;

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

std::map<CacheKey, double>& cache_store() {
    static std::map<CacheKey, double> store;
    return store;
}

std::size_t fingerprint(const Matrix& k) {
    std::string_view bytes(reinterpret_cast<const char*>(k.data()), static_cast<std::size_t>(k.size()) * sizeof(double));
    return std::hash<std::string_view>{}(bytes);
}

}  // namespace

double coordinate_mixing_time(const MarkovChain& chain, Kind kind, double eps, const MixingOptions& options) {
    const CacheKey key{fingerprint(chain.kernel()), chain.size(), static_cast<int>(kind), eps};
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        auto it = cache_store().find(key);
        if (it != cache_store().end()) return it->second;
    }
    const double value = mixing_time(chain, kind, eps, Start::max(), TimeMode::Continuous, options).value;
    std::lock_guard<std::mutex> lock(cache_mutex());
    cache_store()[key] = value;
    return value;
}

void clear_coordinate_cache() {
    std::lock_guard<std::mutex> lock(cache_mutex());
    cache_store().clear();
}

std::size_t coordinate_cache_size() {
    std::lock_guard<std::mutex> lock(cache_mutex());
    return cache_store().size();
}

double tail_threshold(const ProductSpec& spec, const std::vector<double>& u) {
    double th = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) th = std::max(th, u.at(i) * spec.q() / spec.weights[i]);
    return th;
}

namespace {

constexpr double kFloorSlack = 1e-12;

std::vector<double> resolve_u(const ProductSpec& spec, Kind kind, const std::vector<double>& eps, std::vector<double> u) {
    spec.validate();
    if (eps.size() != spec.size()) throw Error(ErrorCode::DimensionMismatch, "one epsilon per coordinate is required");
    if (u.empty()) {
        u.resize(spec.size());
        for (std::size_t i = 0; i < spec.size(); ++i) u[i] = coordinate_mixing_time(spec.coords[i], kind, eps[i]);
    }
    if (u.size() != spec.size()) throw Error(ErrorCode::DimensionMismatch, "one u per coordinate is required");
    for (double ui : u) {
        if (!(ui > 0.0)) throw Error(ErrorCode::InvalidArgument, "u_i must be positive");
    }
    return u;
}

std::vector<long long> floors(const ProductSpec& spec, double t, const std::vector<double>& u) {
    const double th = tail_threshold(spec, u);
    if (t < th * (1.0 - kFloorSlack)) {
        throw Error(ErrorCode::TimeTooSmall, "t=" + std::to_string(t) + " is below max_i u_i q/p_i=" + std::to_string(th));
    }
    std::vector<long long> k(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double r = spec.weights[i] * t / (u[i] * spec.q());
        k[i] = std::max(1LL, static_cast<long long>(std::floor(r * (1.0 + kFloorSlack))));
    }
    return k;
}

}  // namespace

double tail_bound_tv(const ProductSpec& spec, double t, const std::vector<double>& eps, std::vector<double> u) {
    for (double e : eps) {
        if (!(e > 0.0 && e < 0.5)) throw Error(ErrorCode::InvalidArgument, "TV tail bound needs eps_i in (0,1/2)");
    }
    u = resolve_u(spec, Kind::TV, eps, std::move(u));
    const auto k = floors(spec, t, u);
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) s += std::pow(2.0 * eps[i], static_cast<double>(k[i]));
    return -std::expm1(-s);
}

double tail_bound_hellinger(const ProductSpec& spec, double t, const std::vector<double>& eps, std::vector<double> u) {
    for (double e : eps) {
        if (!(e > 0.0 && e < std::sqrt(0.5))) throw Error(ErrorCode::InvalidArgument, "Hellinger tail bound needs eps_i in (0,1/sqrt 2)");
    }
    u = resolve_u(spec, Kind::Hellinger, eps, std::move(u));
    const auto k = floors(spec, t, u);
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) s += std::pow(4.0 * eps[i], 2.0 * static_cast<double>(k[i]));
    return std::sqrt(-std::expm1(-s / 8.0));
}

}  // namespace mixlab
