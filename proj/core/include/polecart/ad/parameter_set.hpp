#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "polecart/ad/tensor.hpp"

namespace polecart::ad {

/// Named collection of trainable tensors. Names are unique and iteration
/// follows insertion order, which doubles as the documented draw order for
/// initialization and the update order for the optimizer.
class ParameterSet {
public:
    struct Entry {
        std::string name;
        Tensor tensor;
    };

    /// Registers a tensor under a unique name and returns a handle to it.
    Tensor& add(std::string name, Tensor tensor);

    bool contains(std::string_view name) const;
    Tensor& get(std::string_view name);
    const Tensor& get(std::string_view name) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<Entry>& entries() { return entries_; }

    void zero_grads();

    /// Total number of scalar parameters.
    std::size_t scalar_count() const;

    /// Value copy of the whole set; the clone's tensors are fresh leaves with
    /// no gradient history.
    ParameterSet clone(bool requires_grad) const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Copies values from src into dst. Both sets must hold the same names with
/// the same shapes; dst keeps its own storage and loses any gradient state.
/// Throws std::invalid_argument on a name or shape mismatch.
void copy_parameters(const ParameterSet& src, ParameterSet& dst);

}  // namespace polecart::ad
