#pragma once

#include "mixlab/chain.hpp"
#include "mixlab/distances.hpp"
#include "mixlab/kernel_eval.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mixlab {

constexpr double kDenseProductLimit = 1e4;

// Coordinates with unnormalised positive weights; coordinate i runs at rate p_i / q.
struct ProductSpec {
    std::vector<MarkovChain> coords;
    std::vector<double> weights;

    double q() const;
    std::size_t size() const { return coords.size(); }
    double coordinate_time(std::size_t i, double t) const;
    double state_count() const;

    // Throws InvalidInput on empty coords, nonpositive weights or length mismatch.
    void validate() const;
};

// One Start per coordinate; Start::max() in a slot maximises over that coordinate's states.
using ProductStart = std::vector<Start>;

ProductStart all_max(const ProductSpec& spec);

struct BoundBracket {
    double lower = 0.0;
    double upper = 0.0;
    Kind kind = Kind::TV;
    std::string source;
};

Matrix kronecker(const Matrix& a, const Matrix& b);
Vector kronecker(const Vector& a, const Vector& b);

MarkovChain dense_product_chain(const ProductSpec& spec);

// Tensor of the coordinate heat kernels at times p_i t / q (oracle sizes only).
Matrix product_heat_kernel_tensor(const ProductSpec& spec, double t, const UniformizationParams& params = {});

// Distances of every coordinate at its own clock p_i t / q.
class CoordinateDistances {
public:
    CoordinateDistances(const ProductSpec& spec, Kind kind, const ProductStart& starts,
                        const UniformizationParams& params = {});

    std::vector<double> at(double t);
    const ProductSpec& spec() const { return *spec_; }
    Kind kind() const { return kind_; }

private:
    const ProductSpec* spec_;
    Kind kind_;
    std::vector<DistanceEvaluator> evals_;
};

// sqrt(1 - prod (1 - d_i^2)) from coordinate Hellinger distances.
double combine_hellinger(const std::vector<double>& d);

double product_hellinger_exact(const ProductSpec& spec, double t, const ProductStart& starts,
                               const UniformizationParams& params = {});

BoundBracket tv_bracket_from(const std::vector<double>& d);
BoundBracket product_tv_bracket(const ProductSpec& spec, double t, const ProductStart& starts,
                                const UniformizationParams& params = {});

// Exact product distance through the dense chain (oracle sizes only). MAX in every slot gives
// the maximum over product point masses; mixed slots are not supported.
double dense_product_distance(const ProductSpec& spec, Kind kind, double t, const ProductStart& starts,
                              const UniformizationParams& params = {});

struct ProdMixingBounds {
    // All values are on the d^rho scale.
    BoundBracket bracket;
    double exp_branch = 0.0;  // 1 - exp{-(rho/2) sum d_i^2}
    double max_branch = 0.0;  // max_i d_i^rho
    int rho = 1;
    std::optional<double> simplified_upper;  // 1 - exp{-c_A sum d_i^rho}, when t >= t_*(A^{1/rho})
    std::optional<double> t_star;
};

ProdMixingBounds prodmixing_from(const std::vector<double>& d, Kind kind);

struct ProdMixingOptions {
    std::optional<double> A;  // enables the simplified upper bound with c_A = 1/(1-A)
    MixingOptions mixing;
};

ProdMixingBounds prodmixing_bounds(const ProductSpec& spec, double t, Kind kind, const ProductStart& starts,
                                   const ProdMixingOptions& options = {});

// Hellinger: sum d_i^2 (bounds d_H^2). TV: sum d_i (bounds d_TV).
double sum_bound(const ProductSpec& spec, double t, Kind kind, const ProductStart& starts,
                 const UniformizationParams& params = {});

// Coordinate maximum mixing time T^(c)_{i,kind}(eps), cached per (kernel fingerprint, kind, eps).
double coordinate_mixing_time(const MarkovChain& chain, Kind kind, double eps, const MixingOptions& options = {});
void clear_coordinate_cache();
std::size_t coordinate_cache_size();

// Empty u means "compute u_i = T_i(eps_i) on demand".
double tail_bound_tv(const ProductSpec& spec, double t, const std::vector<double>& eps, std::vector<double> u = {});
double tail_bound_hellinger(const ProductSpec& spec, double t, const std::vector<double>& eps, std::vector<double> u = {});

// Smallest t accepted by the tail bounds: max_i u_i q / p_i.
double tail_threshold(const ProductSpec& spec, const std::vector<double>& u);

}  // namespace mixlab
