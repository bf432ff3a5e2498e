#pragma once

#include "lightdic/errors.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace lightdic {

/// Dense row-major n x f matrix of f64 node features.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

    bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    void require_finite(const char* what) const {
        if (!all_finite()) throw NumericError(std::string(what) + ": non-finite entries");
    }
};

} // namespace lightdic
