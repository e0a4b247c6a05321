#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stoptree {

/// Response vector plus column-major covariate matrix for one node,
/// together with the original dataset row indices.
struct NodeData {
    std::vector<double> y;            ///< length n
    std::vector<double> x;            ///< column-major, n rows by d columns
    std::vector<std::size_t> row_ids; ///< length n
    std::size_t d = 0;

    std::size_t n() const { return y.size(); }

    double covariate(std::size_t i, std::size_t j) const { return x[j * y.size() + i]; }

    void validate() const {
        const std::size_t rows = y.size();
        if (rows == 0) {
            throw std::invalid_argument("NodeData: empty response");
        }
        if (d == 0) {
            throw std::invalid_argument("NodeData: needs at least one covariate column");
        }
        if (x.size() != rows * d) {
            throw std::invalid_argument("NodeData: covariate storage does not match n*d");
        }
        if (row_ids.size() != rows) {
            throw std::invalid_argument("NodeData: row_ids length does not match n");
        }
        for (double v : y) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("NodeData: non-finite response value");
            }
        }
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("NodeData: non-finite covariate value");
            }
        }
    }
};

/// Convenience constructor; row_ids default to 0..n-1.
inline NodeData make_node_data(std::vector<double> y, std::vector<double> x_colmajor,
                               std::size_t d) {
    NodeData node;
    node.row_ids.resize(y.size());
    std::iota(node.row_ids.begin(), node.row_ids.end(), std::size_t{0});
    node.y = std::move(y);
    node.x = std::move(x_colmajor);
    node.d = d;
    return node;
}

} // namespace stoptree
