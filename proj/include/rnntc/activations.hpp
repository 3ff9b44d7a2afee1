#pragma once

#include <cmath>
#include <span>

#include "rnntc/tensor.hpp"

namespace rnntc {

/// Logistic function, evaluated without overflow for large |x|.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double tanh(double x) { return std::tanh(x); }

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

Vector sigmoid(std::span<const double> x);
Vector tanh(std::span<const double> x);
Vector relu(std::span<const double> x);

/// Max-subtracted softmax.
Vector softmax(std::span<const double> logits);

}  // namespace rnntc
