#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace tfluct {

/// Square matrix stored by diagonals inside |i - j| <= half_width.
/// Row i holds columns i - w .. i + w at offsets 0 .. 2w; out-of-range
/// columns are kept as zeros so row kernels stay branch-free.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(int n, int half_width);

    int n() const { return n_; }
    int half_width() const { return w_; }
    int stride() const { return 2 * w_ + 1; }

    /// Entry (i, j), 0-based; zero outside the band.
    double operator()(int i, int j) const;
    double& at(int i, int j);

    std::span<double> row(int i) { return {data_.data() + static_cast<std::size_t>(i) * stride(), static_cast<std::size_t>(stride())}; }
    std::span<const double> row(int i) const { return {data_.data() + static_cast<std::size_t>(i) * stride(), static_cast<std::size_t>(stride())}; }

    Eigen::MatrixXd to_dense() const;

private:
    int n_ = 0;
    int w_ = 0;
    std::vector<double> data_;
};

/// A * B for band matrices of equal size; the product has half-width wa + wb
/// (capped at n - 1). Cost n (2wa+1)(2wb+1).
BandMatrix multiply(const BandMatrix& a, const BandMatrix& b);

/// sum_ij A_ij B_ij.
double frobenius_inner(const BandMatrix& a, const BandMatrix& b);

} // namespace tfluct
