#include "polecart/ad/parameter_set.hpp"

#include <stdexcept>
#include <utility>

namespace polecart::ad {

Tensor& ParameterSet::add(std::string name, Tensor tensor) {
    if (!tensor.defined()) {
        throw std::invalid_argument("ParameterSet::add: undefined tensor for '" + name + "'");
    }
    auto [it, inserted] = index_.emplace(name, entries_.size());
    if (!inserted) {
        throw std::invalid_argument("ParameterSet::add: duplicate name '" + name + "'");
    }
    entries_.push_back({std::move(name), std::move(tensor)});
    return entries_.back().tensor;
}

bool ParameterSet::contains(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

Tensor& ParameterSet::get(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw std::invalid_argument("ParameterSet::get: no parameter named '" +
                                    std::string(name) + "'");
    }
    return entries_[it->second].tensor;
}

const Tensor& ParameterSet::get(std::string_view name) const {
    return const_cast<ParameterSet*>(this)->get(name);
}

void ParameterSet::zero_grads() {
    for (Entry& e : entries_) e.tensor.zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
    std::size_t n = 0;
    for (const Entry& e : entries_) n += e.tensor.values().size();
    return n;
}

ParameterSet ParameterSet::clone(bool requires_grad) const {
    ParameterSet out;
    for (const Entry& e : entries_) {
        out.add(e.name, e.tensor.detached_copy(requires_grad));
    }
    return out;
}

void copy_parameters(const ParameterSet& src, ParameterSet& dst) {
    if (src.size() != dst.size()) {
        throw std::invalid_argument("copy_parameters: sets differ in size (" +
                                    std::to_string(src.size()) + " vs " +
                                    std::to_string(dst.size()) + ")");
    }
    // Validate everything before touching dst.
    for (const auto& e : src.entries()) {
        if (!dst.contains(e.name)) {
            throw std::invalid_argument("copy_parameters: '" + e.name + "' missing in destination");
        }
        const Tensor& d = dst.get(e.name);
        if (d.rows() != e.tensor.rows() || d.cols() != e.tensor.cols()) {
            throw std::invalid_argument("copy_parameters: shape mismatch for '" + e.name +
                                        "' " + e.tensor.shape_str() + " vs " + d.shape_str());
        }
    }
    for (const auto& e : src.entries()) {
        Tensor& d = dst.get(e.name);
        d.mutable_values() = e.tensor.values();
        d.zero_grad();
    }
}

}  // namespace polecart::ad
