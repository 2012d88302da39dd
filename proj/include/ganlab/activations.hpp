#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ganlab {

enum class Act { relu, leaky_relu, tanh, sigmoid, identity };

constexpr double kLeakySlope = 0.2;

inline const char* to_string(Act a) {
    switch (a) {
        case Act::relu: return "relu";
        case Act::leaky_relu: return "leaky_relu";
        case Act::tanh: return "tanh";
        case Act::sigmoid: return "sigmoid";
        case Act::identity: return "identity";
    }
    return "unknown";
}

inline Act act_from_string(const std::string& s) {
    if (s == "relu") return Act::relu;
    if (s == "leaky_relu") return Act::leaky_relu;
    if (s == "tanh") return Act::tanh;
    if (s == "sigmoid") return Act::sigmoid;
    if (s == "identity") return Act::identity;
    throw std::invalid_argument("unknown activation tag: " + s);
}

inline double act_apply(Act a, double z) {
    switch (a) {
        case Act::relu: return z > 0.0 ? z : 0.0;
        case Act::leaky_relu: return z > 0.0 ? z : kLeakySlope * z;
        case Act::tanh: return std::tanh(z);
        case Act::sigmoid:
            return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        case Act::identity: return z;
    }
    return z;
}

// derivative expressed through the pre-activation z and the stored output y
inline double act_deriv(Act a, double z, double y) {
    switch (a) {
        case Act::relu: return z > 0.0 ? 1.0 : 0.0;
        case Act::leaky_relu: return z > 0.0 ? 1.0 : kLeakySlope;
        case Act::tanh: return 1.0 - y * y;
        case Act::sigmoid: return y * (1.0 - y);
        case Act::identity: return 1.0;
    }
    return 1.0;
}

}  // namespace ganlab
