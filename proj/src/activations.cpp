#include "rnntc/activations.hpp"

#include <algorithm>
#include <cmath>

namespace rnntc {

Vector sigmoid(std::span<const double> x) {
    Vector out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return sigmoid(v); });
    return out;
}

Vector tanh(std::span<const double> x) {
    Vector out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::tanh(v); });
    return out;
}

Vector relu(std::span<const double> x) {
    Vector out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return relu(v); });
    return out;
}

Vector softmax(std::span<const double> logits) {
    Vector out(logits.size());
    if (logits.empty()) {
        return out;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - peak);
        total += out[k];
    }
    for (double& p : out) {
        p /= total;
    }
    return out;
}

}  // namespace rnntc
