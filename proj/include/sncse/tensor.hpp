#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "sncse/errors.hpp"

namespace sncse::num {

// Dense row-major double tensor. The graph layer works with rank-2 shapes
// (scalars are [1,1], row vectors [1,n]); storage itself is rank-agnostic
// so checkpoints can carry any shape.
class Tensor {
public:
    Tensor() = default;

    Tensor(std::vector<int> shape, double fill = 0.0) : shape_(std::move(shape)) {
        v_.assign(numel_of(shape_), fill);
    }

    Tensor(std::vector<int> shape, std::vector<double> values)
        : shape_(std::move(shape)), v_(std::move(values)) {
        if (numel_of(shape_) != v_.size())
            throw DimError("tensor: value count does not match shape");
    }

    static Tensor zeros(int rows, int cols) { return Tensor({rows, cols}); }

    static Tensor scalar(double x) { return Tensor({1, 1}, std::vector<double>{x}); }

    static Tensor row(std::initializer_list<double> xs) {
        return Tensor({1, static_cast<int>(xs.size())}, std::vector<double>(xs));
    }

    static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        int m = static_cast<int>(rows.size());
        int n = m > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        Tensor t({m, n});
        int i = 0;
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != n) throw DimError("from_rows: ragged rows");
            int j = 0;
            for (double x : r) t.at(i, j++) = x;
            ++i;
        }
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }

    size_t numel() const { return v_.size(); }

    bool is_matrix() const { return shape_.size() == 2; }

    int rows() const {
        require_matrix();
        return shape_[0];
    }

    int cols() const {
        require_matrix();
        return shape_[1];
    }

    bool is_scalar() const { return is_matrix() && shape_[0] == 1 && shape_[1] == 1; }

    double item() const {
        if (v_.size() != 1) throw ContractError("item(): tensor is not scalar");
        return v_[0];
    }

    double& at(int i, int j) { return v_[static_cast<size_t>(i) * shape_[1] + j]; }
    double at(int i, int j) const { return v_[static_cast<size_t>(i) * shape_[1] + j]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

    std::string shape_str() const {
        std::string s = "[";
        for (size_t i = 0; i < shape_.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(shape_[i]);
        }
        return s + "]";
    }

    static size_t numel_of(const std::vector<int>& shape) {
        size_t n = 1;
        for (int d : shape) {
            if (d < 0) throw DimError("negative dimension");
            n *= static_cast<size_t>(d);
        }
        return n;
    }

private:
    void require_matrix() const {
        if (shape_.size() != 2) throw DimError("expected rank-2 tensor, got " + shape_str());
    }

    std::vector<int> shape_;
    std::vector<double> v_;
};

}  // namespace sncse::num
