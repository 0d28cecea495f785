#pragma once

#include <vector>

namespace ppics {

// Nodes and weights for a fixed-order rule. Rules are computed once per
// order and cached; references stay valid for the program lifetime.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> log_weights;
};

// Gauss-Hermite rule for integrals of the form  int exp(-x^2) f(x) dx.
const QuadratureRule& gauss_hermite(int n);

// Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

}  // namespace ppics
