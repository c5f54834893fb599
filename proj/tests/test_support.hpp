#pragma once

#include "mixlab/chain.hpp"
#include "mixlab/product.hpp"

#include <random>

namespace mixlab::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Mixture of dense and sparse-ish vectors so both interior and boundary cases show up.
inline Vector random_distribution(Rng& rng, Eigen::Index n) {
    Vector v(n);
    const bool sparse = uniform(rng, 0.0, 1.0) < 0.3;
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = std::exponential_distribution<double>(1.0)(rng);
        if (sparse && uniform(rng, 0.0, 1.0) < 0.5) x = 0.0;
        v[i] = x;
    }
    if (v.sum() == 0.0) v[uniform_int(rng, 0, static_cast<int>(n) - 1)] = 1.0;
    return v / v.sum();
}

// Strictly positive off-diagonal mass along a cycle keeps the chain irreducible.
inline MarkovChain random_chain(Rng& rng, int n) {
    Matrix k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = uniform(rng, 0.0, 1.0) < 0.6 ? uniform(rng, 0.0, 1.0) : 0.0;
    for (int i = 0; i < n; ++i) k(i, (i + 1) % n) += 0.2;
    for (int i = 0; i < n; ++i) k.row(i) /= k.row(i).sum();
    return MarkovChain::from_kernel(std::move(k), "random");
}

// Symmetric conductances w; K(x,y) = w(x,y)/w(x) is reversible with pi proportional to w(x).
inline MarkovChain random_reversible_chain(Rng& rng, int n) {
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double x = uniform(rng, 0.0, 1.0) < 0.7 ? uniform(rng, 0.05, 1.0) : 0.0;
            w(i, j) = x;
            w(j, i) = x;
        }
    }
    for (int i = 0; i + 1 < n; ++i) {
        w(i, i + 1) += 0.1;
        w(i + 1, i) += 0.1;
    }
    Vector deg = w.rowwise().sum();
    Matrix k = w;
    for (int i = 0; i < n; ++i) k.row(i) /= deg[i];
    return MarkovChain::from_kernel(std::move(k), "random-reversible", deg / deg.sum());
}

inline ProductSpec random_product(Rng& rng, int min_coords = 2, int max_coords = 3, int max_states = 4) {
    ProductSpec spec;
    const int k = uniform_int(rng, min_coords, max_coords);
    for (int i = 0; i < k; ++i) {
        spec.coords.push_back(random_chain(rng, uniform_int(rng, 2, max_states)));
        spec.weights.push_back(uniform(rng, 0.2, 3.0));
    }
    return spec;
}

}  // namespace mixlab::testing
