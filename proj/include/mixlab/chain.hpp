#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace mixlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kDistributionTol = 1e-9;
constexpr double kRowSumTol = 1e-9;
constexpr double kStationaryTol = 1e-8;
constexpr double kReversibleTol = 1e-10;
constexpr double kSupportThreshold = 1e-15;

enum class ViolationKind { NonStochasticRow, NegativeEntry, NonFinite, Reducible, NotStationary, InvalidStationary };

const char* violation_kind_name(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string location;
    double magnitude = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;

    void add(ViolationKind kind, std::string location, double magnitude);
    std::string summary() const;
};

// Throws InvalidInput unless v is a probability vector within kDistributionTol.
void require_distribution(const Vector& v, const char* what);
bool is_distribution(const Vector& v, double tol = kDistributionTol);
Vector point_mass(Eigen::Index n, Eigen::Index x);

bool is_irreducible(const Matrix& kernel, double threshold = kSupportThreshold);

ValidationReport validate_chain(const Matrix& kernel, const std::optional<Vector>& stationary = std::nullopt);

Vector stationary_distribution(const Matrix& kernel);

Vector power_distribution(const Vector& start, const Matrix& kernel, long long m);

class MarkovChain {
public:
    // Validates the kernel (and the supplied stationary vector, if any); throws InvalidInput
    // carrying the validation summary on any violation.
    static MarkovChain from_kernel(Matrix kernel, std::string label = {},
                                   std::optional<Vector> stationary = std::nullopt);

    const Matrix& kernel() const { return kernel_; }
    const Vector& stationary() const { return stationary_; }
    bool reversible() const { return reversible_; }
    const std::string& label() const { return label_; }
    Eigen::Index size() const { return kernel_.rows(); }

private:
    MarkovChain() = default;

    Matrix kernel_;
    Vector stationary_;
    bool reversible_ = false;
    std::string label_;
};

bool detailed_balance_holds(const Matrix& kernel, const Vector& pi, double tol = kReversibleTol);

double spectral_gap(const MarkovChain& chain);

}  // namespace mixlab
