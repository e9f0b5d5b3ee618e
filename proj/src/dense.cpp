#include "ermip/dense.hpp"

#include <algorithm>

namespace ermip {

DenseRows to_dense(std::span<const CoefVec> set) {
    DenseRows out;
    for (const auto& v : set) {
        for (const auto& [j, x] : v) out.columns.push_back(j);
    }
    std::sort(out.columns.begin(), out.columns.end());
    out.columns.erase(std::unique(out.columns.begin(), out.columns.end()), out.columns.end());
    out.rows = set.size();
    out.data.assign(out.rows * out.cols(), 0.0);
    for (std::size_t r = 0; r < set.size(); ++r) {
        for (const auto& [j, x] : set[r]) {
            const auto c = static_cast<std::size_t>(
                std::lower_bound(out.columns.begin(), out.columns.end(), j) - out.columns.begin());
            out.data[r * out.cols() + c] = x;
        }
    }
    return out;
}

double weighted_dist_sq(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
    double acc = 0.0;
    if (weights.empty()) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            acc += d * d;
        }
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = weights[i] * (x[i] - y[i]);
            acc += d * d;
        }
    }
    return acc;
}

}  // namespace ermip
