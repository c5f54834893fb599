#pragma once

#include "mixlab/chain.hpp"
#include "mixlab/kernel_eval.hpp"
#include "mixlab/product.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mixlab {

using FamilyMember = std::variant<MarkovChain, ProductSpec>;

// Indexed generator n -> chain or product.
struct FamilySpec {
    std::string label;
    std::function<FamilyMember(int)> generator;
    std::function<double(int)> epsilon_schedule;  // optional
    std::function<Start(int)> start;              // optional; chains only, MAX when absent
};

// Triangular array of coordinates (n, i), 1 <= i <= size(n), with weights carried as logs so
// that schedules such as n^2 exp(-n^gamma) stay representable.
struct ProductFamily {
    std::string label;
    std::function<int(int)> size;
    std::function<MarkovChain(int, int)> coordinate;
    std::function<double(int, int)> log_weight;

    // Product of the n-th row with weights rescaled by the largest one (the product chain only
    // depends on weight ratios). Throws InvalidInput when a rescaled weight underflows.
    ProductSpec spec(int n) const;
};

}  // namespace mixlab
