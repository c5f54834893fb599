#include "mixlab/chain.hpp"

#include "mixlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace mixlab {

const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::NonStochasticRow: return "NonStochasticRow";
        case ViolationKind::NegativeEntry: return "NegativeEntry";
        case ViolationKind::NonFinite: return "NonFinite";
        case ViolationKind::Reducible: return "Reducible";
        case ViolationKind::NotStationary: return "NotStationary";
        case ViolationKind::InvalidStationary: return "InvalidStationary";
    }
    return "Unknown";
}

void ValidationReport::add(ViolationKind kind, std::string location, double magnitude) {
    ok = false;
    violations.push_back({kind, std::move(location), magnitude});
}

std::string ValidationReport::summary() const {
    if (ok) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violation_kind_name(violations[i].kind) << " at " << violations[i].location
           << " (magnitude " << violations[i].magnitude << ")";
        if (i == 9 && violations.size() > 10) {
            os << "; ... " << violations.size() - 10 << " more";
            break;
        }
    }
    return os.str();
}

bool is_distribution(const Vector& v, double tol) {
    if (v.size() == 0) return false;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || v[i] < 0.0) return false;
        sum += v[i];
    }
    return std::abs(sum - 1.0) <= tol;
}

void require_distribution(const Vector& v, const char* what) {
    if (!is_distribution(v)) {
        throw Error(ErrorCode::InvalidInput, std::string(what) + " is not a probability vector");
    }
}

Vector point_mass(Eigen::Index n, Eigen::Index x) {
    if (x < 0 || x >= n) throw Error(ErrorCode::InvalidArgument, "point mass state out of range");
    Vector v = Vector::Zero(n);
    v[x] = 1.0;
    return v;
}

namespace {

std::vector<bool> reachable(const Matrix& k, double threshold, bool forward) {
    const Eigen::Index n = k.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<Eigen::Index> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        Eigen::Index x = queue.front();
        queue.pop_front();
        for (Eigen::Index y = 0; y < n; ++y) {
            double w = forward ? k(x, y) : k(y, x);
            if (w > threshold && !seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = true;
                queue.push_back(y);
            }
        }
    }
    return seen;
}

void require_square(const Matrix& kernel) {
    if (kernel.rows() != kernel.cols() || kernel.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "kernel must be a nonempty square matrix");
    }
}

// Grassmann-Taksar-Heyman elimination: a dense direct solve of pi (K - I) = 0 that
// avoids subtractions, so tiny stationary masses keep full relative accuracy.
Vector gth_stationary(const Matrix& kernel) {
    const Eigen::Index n = kernel.rows();
    Matrix a = kernel;
    for (Eigen::Index k = n - 1; k >= 1; --k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) s += a(k, j);
        if (!(s > 0.0)) throw Error(ErrorCode::Reducible, "state elimination hit a closed class");
        for (Eigen::Index i = 0; i < k; ++i) a(i, k) /= s;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (Eigen::Index j = 0; j < k; ++j) a(i, j) += aik * a(k, j);
        }
    }
    Vector pi(n);
    pi[0] = 1.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < j; ++i) acc += pi[i] * a(i, j);
        pi[j] = acc;
        // Rescale to keep the unnormalised masses inside the double range.
        if (acc > 1e150) pi.head(j + 1) /= acc;
    }
    return pi / pi.sum();
}

Vector cesaro_stationary(const Matrix& kernel) {
    const Eigen::Index n = kernel.rows();
    Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
    Vector avg = v;
    for (long it = 1; it <= 200000; ++it) {
        v = kernel.transpose() * v;
        avg += (v - avg) / static_cast<double>(it + 1);
        if (it % 64 == 0) {
            Vector candidate = avg / avg.sum();
            if ((kernel.transpose() * candidate - candidate).lpNorm<Eigen::Infinity>() <= 1e-10) return candidate;
        }
    }
    throw Error(ErrorCode::NoConvergence, "power iteration did not reach residual 1e-10");
}

}  // namespace

bool is_irreducible(const Matrix& kernel, double threshold) {
    require_square(kernel);
    auto fwd = reachable(kernel, threshold, true);
    auto bwd = reachable(kernel, threshold, false);
    return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
           std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

ValidationReport validate_chain(const Matrix& kernel, const std::optional<Vector>& stationary) {
    require_square(kernel);
    const Eigen::Index n = kernel.rows();
    ValidationReport report;
    bool finite = true;
    for (Eigen::Index x = 0; x < n; ++x) {
        double sum = 0.0;
        for (Eigen::Index y = 0; y < n; ++y) {
            const double v = kernel(x, y);
            const std::string loc = "(" + std::to_string(x) + "," + std::to_string(y) + ")";
            if (!std::isfinite(v)) {
                report.add(ViolationKind::NonFinite, loc, v);
                finite = false;
                continue;
            }
            if (v < 0.0) report.add(ViolationKind::NegativeEntry, loc, -v);
            sum += v;
        }
        if (std::isfinite(sum) && std::abs(sum - 1.0) > kRowSumTol) {
            report.add(ViolationKind::NonStochasticRow, "row " + std::to_string(x), std::abs(sum - 1.0));
        }
    }
    if (finite && !is_irreducible(kernel)) report.add(ViolationKind::Reducible, "support graph", 0.0);
    if (stationary) {
        if (stationary->size() != n) throw Error(ErrorCode::DimensionMismatch, "stationary length differs from kernel size");
        if (!is_distribution(*stationary)) {
            report.add(ViolationKind::InvalidStationary, "stationary", std::abs(stationary->sum() - 1.0));
        } else if (finite) {
            Vector residual = kernel.transpose() * (*stationary) - *stationary;
            for (Eigen::Index y = 0; y < n; ++y) {
                if (std::abs(residual[y]) > kStationaryTol) {
                    report.add(ViolationKind::NotStationary, "entry " + std::to_string(y), std::abs(residual[y]));
                }
            }
        }
    }
    return report;
}

Vector stationary_distribution(const Matrix& kernel) {
    require_square(kernel);
    if (!is_irreducible(kernel)) throw Error(ErrorCode::Reducible, "kernel support graph is not strongly connected");
    Vector pi = kernel.rows() <= 2000 ? gth_stationary(kernel) : cesaro_stationary(kernel);
    const double residual = (kernel.transpose() * pi - pi).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10)) {
        throw Error(ErrorCode::NoConvergence, "stationary residual " + std::to_string(residual) + " exceeds 1e-10");
    }
    return pi;
}

Vector power_distribution(const Vector& start, const Matrix& kernel, long long m) {
    if (kernel.rows() != kernel.cols() || start.size() != kernel.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "start length differs from kernel size");
    }
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "power must be nonnegative");
    Vector v = start;
    for (long long i = 0; i < m; ++i) v = kernel.transpose() * v;
    return v;
}

bool detailed_balance_holds(const Matrix& kernel, const Vector& pi, double tol) {
    const Eigen::Index n = kernel.rows();
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = x + 1; y < n; ++y) {
            if (std::abs(pi[x] * kernel(x, y) - pi[y] * kernel(y, x)) > tol) return false;
        }
    }
    return true;
}

MarkovChain MarkovChain::from_kernel(Matrix kernel, std::string label, std::optional<Vector> stationary) {
    ValidationReport report = validate_chain(kernel, stationary);
    if (!report.ok) throw Error(ErrorCode::InvalidInput, "chain '" + label + "' rejected: " + report.summary());
    MarkovChain chain;
    chain.stationary_ = stationary ? *stationary : stationary_distribution(kernel);
    chain.stationary_ /= chain.stationary_.sum();
    chain.reversible_ = detailed_balance_holds(kernel, chain.stationary_);
    chain.kernel_ = std::move(kernel);
    chain.label_ = std::move(label);
    return chain;
}

double spectral_gap(const MarkovChain& chain) {
    if (!chain.reversible()) throw Error(ErrorCode::NotReversible, "spectral gap requires a reversible chain");
    const Eigen::Index n = chain.size();
    if (n == 1) return 0.0;
    Vector sq = chain.stationary().cwiseSqrt();
    Eigen::MatrixXd s(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) s(x, y) = sq[x] * chain.kernel()(x, y) / sq[y];
    }
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
    // Eigenvalues come back ascending; the top one is 1.
    return 1.0 - solver.eigenvalues()[n - 2];
}

}  // namespace mixlab
