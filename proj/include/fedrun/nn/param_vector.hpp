#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fedrun/errors.hpp"
#include "fedrun/nn/layout.hpp"

namespace fedrun::nn {

// Flat float32 view of all model parameters (including batch-norm running
// statistics, which travel with the trainable weights in federation).
// Arithmetic accumulates in 64-bit.
struct ParamVector {
    LayoutPtr layout;
    std::vector<float> values;

    ParamVector() = default;
    ParamVector(LayoutPtr l, std::vector<float> v) : layout(std::move(l)), values(std::move(v)) {
        if (layout && values.size() != layout->total_size())
            throw ShapeError("ParamVector size does not match layout");
    }

    size_t size() const { return values.size(); }

    void require_same_layout(const ParamVector& o) const {
        if (!same_layout(layout, o.layout))
            throw ShapeError("ParamVector layouts differ");
    }

    static ParamVector zeros_like(const ParamVector& p) {
        return ParamVector(p.layout, std::vector<float>(p.values.size(), 0.0f));
    }

    // this += s * other
    void add_scaled(const ParamVector& o, double s) {
        require_same_layout(o);
        for (size_t i = 0; i < values.size(); ++i)
            values[i] = static_cast<float>(values[i] + s * o.values[i]);
    }

    double squared_norm() const {
        double acc = 0.0;
        for (float v : values) acc += static_cast<double>(v) * v;
        return acc;
    }

    double squared_distance(const ParamVector& o) const {
        require_same_layout(o);
        double acc = 0.0;
        for (size_t i = 0; i < values.size(); ++i) {
            double d = static_cast<double>(values[i]) - o.values[i];
            acc += d * d;
        }
        return acc;
    }

    // difference as doubles, for the regulariser input
    std::vector<double> diff_as_double(const ParamVector& o) const {
        require_same_layout(o);
        std::vector<double> d(values.size());
        for (size_t i = 0; i < values.size(); ++i)
            d[i] = static_cast<double>(values[i]) - o.values[i];
        return d;
    }

    bool all_finite() const {
        for (float v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const ParamVector& o) const {
        return same_layout(layout, o.layout) && values == o.values;
    }
};

}  // namespace fedrun::nn
