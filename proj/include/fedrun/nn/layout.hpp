#pragma once

#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace fedrun::nn {

struct TensorSpec {
    std::string name;
    size_t offset = 0;
    std::vector<size_t> shape;
    bool trainable = true;

    size_t size() const {
        size_t n = 1;
        for (size_t d : shape) n *= d;
        return n;
    }

    bool operator==(const TensorSpec&) const = default;
};

// Ordered (name, offset, shape) table describing one flat parameter vector.
// Shared by the model, its gradients, and everything exchanged in federation.
class Layout {
public:
    explicit Layout(std::vector<TensorSpec> entries) : entries_(std::move(entries)) {
        for (const auto& e : entries_) {
            total_ += e.size();
            if (e.trainable) trainable_ += e.size();
        }
    }

    const std::vector<TensorSpec>& entries() const { return entries_; }
    size_t total_size() const { return total_; }
    size_t trainable_count() const { return trainable_; }

    const TensorSpec* find(std::string_view name) const {
        for (const auto& e : entries_)
            if (e.name == name) return &e;
        return nullptr;
    }

    bool operator==(const Layout& o) const { return entries_ == o.entries_; }

private:
    std::vector<TensorSpec> entries_;
    size_t total_ = 0;
    size_t trainable_ = 0;
};

using LayoutPtr = std::shared_ptr<const Layout>;

inline bool same_layout(const LayoutPtr& a, const LayoutPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

}  // namespace fedrun::nn
