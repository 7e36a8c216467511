#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace weatkit {

/// Heterogeneous string hashing so map lookups take string_view without an
/// allocation.
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
    std::size_t operator()(const std::string& s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Row-major so that per-word rows are contiguous.
template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Scalar = double;
using Vec = Vector<Scalar>;
using Mat = Matrix<Scalar>;

/// Cosine similarity of two dense vector expressions. Throws if either
/// vector has zero norm.
template <typename DerivedA, typename DerivedB>
Scalar cosine(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    const Scalar na = a.norm();
    const Scalar nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw std::domain_error("cosine: zero-norm vector");
    }
    return static_cast<Scalar>(a.dot(b)) / (na * nb);
}

}  // namespace weatkit
