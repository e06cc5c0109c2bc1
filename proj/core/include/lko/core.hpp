#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "lko/error.hpp"

namespace lko {

/// Dense row-major n x d matrix of finite reals. Genotype data is stored here
/// too; `is_genotype()` checks the {0,1,2} restriction when a caller needs it.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }

    std::span<const double> values() const noexcept { return values_; }

    void append_row(std::span<const double> r);

    bool is_genotype() const noexcept;

    bool operator==(const FeatureMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Binary labels, one per sample.
using Response = std::vector<int>;

/// Sorted, deduplicated feature indices.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::initializer_list<std::size_t> idx);
    explicit IndexSet(std::vector<std::size_t> idx);

    /// All indices in [0, d).
    static IndexSet all(std::size_t d);

    bool contains(std::size_t j) const noexcept;
    std::size_t size() const noexcept { return idx_.size(); }
    bool empty() const noexcept { return idx_.empty(); }
    auto begin() const noexcept { return idx_.begin(); }
    auto end() const noexcept { return idx_.end(); }
    const std::vector<std::size_t>& indices() const noexcept { return idx_; }
    std::size_t max_plus_one() const noexcept { return idx_.empty() ? 0 : idx_.back() + 1; }

    IndexSet unite(const IndexSet& other) const;
    IndexSet intersect(const IndexSet& other) const;
    /// Indices of [0, d) not in this set.
    IndexSet complement(std::size_t d) const;

    bool operator==(const IndexSet&) const = default;

private:
    std::vector<std::size_t> idx_;
};

/// Aligned originals, knockoffs and labels.
struct PairedDataset {
    FeatureMatrix x;
    FeatureMatrix x_knock;
    Response y;

    PairedDataset() = default;
    PairedDataset(FeatureMatrix x, FeatureMatrix x_knock, Response y);

    std::size_t rows() const noexcept { return x.rows(); }
    std::size_t cols() const noexcept { return x.cols(); }

    bool operator==(const PairedDataset&) const = default;
};

/// Closed sup-norm ball B(center, radius).
struct Region {
    std::vector<double> center;
    double radius = 1.0;

    Region() = default;
    Region(std::vector<double> center, double radius);

    std::size_t dim() const noexcept { return center.size(); }
};

double sup_distance(std::span<const double> a, std::span<const double> b);

/// Boundary-inclusive membership: sup_distance(center, point) <= radius.
bool region_contains(const Region& region, std::span<const double> point);

/// Rows whose original AND knockoff both lie in the ball, in input order.
PairedDataset subsample_region(const PairedDataset& data, const Region& region);

/// Row indices retained by subsample_region.
std::vector<std::size_t> region_rows(const PairedDataset& data, const Region& region);

/// Copies of the selected rows of a matrix / response.
FeatureMatrix take_rows(const FeatureMatrix& m, std::span<const std::size_t> rows);
Response take_rows(const Response& y, std::span<const std::size_t> rows);

/// [x, x_knock] with the coordinates in `swapped` exchanged, row by row.
PairedDataset swap_columns(const PairedDataset& data, const IndexSet& swapped);

} // namespace lko
