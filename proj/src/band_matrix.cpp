#include "tfluct/band_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace tfluct {

BandMatrix::BandMatrix(int n, int half_width) : n_(n), w_(std::min(half_width, std::max(n - 1, 0)))
{
    if (n < 1 || half_width < 0) {
        throw std::invalid_argument("band matrix needs n >= 1 and half-width >= 0");
    }
    data_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(stride()), 0.0);
}

double BandMatrix::operator()(int i, int j) const
{
    const int d = j - i;
    if (d < -w_ || d > w_ || i < 0 || i >= n_ || j < 0 || j >= n_) {
        return 0.0;
    }
    return data_[static_cast<std::size_t>(i) * stride() + static_cast<std::size_t>(d + w_)];
}

double& BandMatrix::at(int i, int j)
{
    const int d = j - i;
    if (d < -w_ || d > w_ || i < 0 || i >= n_ || j < 0 || j >= n_) {
        throw std::out_of_range("band matrix index outside the band");
    }
    return data_[static_cast<std::size_t>(i) * stride() + static_cast<std::size_t>(d + w_)];
}

Eigen::MatrixXd BandMatrix::to_dense() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = std::max(0, i - w_); j <= std::min(n_ - 1, i + w_); ++j) {
            m(i, j) = (*this)(i, j);
        }
    }
    return m;
}

BandMatrix multiply(const BandMatrix& a, const BandMatrix& b)
{
    if (a.n() != b.n()) {
        throw std::invalid_argument("band matrix sizes differ");
    }
    const int n = a.n();
    const int wa = a.half_width();
    const int wb = b.half_width();
    BandMatrix c(n, wa + wb);
    const int wc = c.half_width();
    for (int i = 0; i < n; ++i) {
        const auto arow = a.row(i);
        double* crow = c.row(i).data();
        const int k_lo = std::max(0, i - wa);
        const int k_hi = std::min(n - 1, i + wa);
        for (int k = k_lo; k <= k_hi; ++k) {
            const double aik = arow[static_cast<std::size_t>(k - i + wa)];
            if (aik == 0.0) {
                continue;
            }
            // C(i, j) += A(i, k) B(k, j) for j in k-wb .. k+wb
            const double* brow = b.row(k).data();
            const int j_lo = std::max(0, k - wb);
            const int j_hi = std::min(n - 1, k + wb);
            double* dst = crow + (j_lo - i + wc);
            const double* src = brow + (j_lo - k + wb);
            const int len = j_hi - j_lo + 1;
            for (int t = 0; t < len; ++t) {
                dst[t] += aik * src[t];
            }
        }
    }
    return c;
}

double frobenius_inner(const BandMatrix& a, const BandMatrix& b)
{
    if (a.n() != b.n()) {
        throw std::invalid_argument("band matrix sizes differ");
    }
    const int n = a.n();
    const int w = std::min(a.half_width(), b.half_width());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* ar = a.row(i).data() + (a.half_width() - w);
        const double* br = b.row(i).data() + (b.half_width() - w);
        double acc = 0.0;
        for (int t = 0; t < 2 * w + 1; ++t) {
            acc += ar[t] * br[t];
        }
        total += acc;
    }
    return total;
}

} // namespace tfluct
