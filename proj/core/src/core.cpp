#include "lko/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace lko {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    require(values_.size() == rows * cols, ErrorKind::dimension,
            "matrix storage holds " + std::to_string(values_.size()) + " values, expected " +
                std::to_string(rows * cols));
    for (double v : values_) require(std::isfinite(v), ErrorKind::data, "non-finite matrix entry");
}

FeatureMatrix::FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    values_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, ErrorKind::dimension, "ragged matrix literal");
        values_.insert(values_.end(), r.begin(), r.end());
    }
}

void FeatureMatrix::append_row(std::span<const double> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    require(r.size() == cols_, ErrorKind::dimension, "row length does not match matrix width");
    values_.insert(values_.end(), r.begin(), r.end());
    ++rows_;
}

bool FeatureMatrix::is_genotype() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0 || v == 2.0; });
}

IndexSet::IndexSet(std::initializer_list<std::size_t> idx) : IndexSet(std::vector<std::size_t>(idx)) {}

IndexSet::IndexSet(std::vector<std::size_t> idx) : idx_(std::move(idx)) {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
}

IndexSet IndexSet::all(std::size_t d) {
    std::vector<std::size_t> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = j;
    return IndexSet(std::move(v));
}

bool IndexSet::contains(std::size_t j) const noexcept { return std::binary_search(idx_.begin(), idx_.end(), j); }

IndexSet IndexSet::unite(const IndexSet& other) const {
    std::vector<std::size_t> out;
    std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(), std::back_inserter(out));
    return IndexSet(std::move(out));
}

IndexSet IndexSet::intersect(const IndexSet& other) const {
    std::vector<std::size_t> out;
    std::set_intersection(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(), std::back_inserter(out));
    return IndexSet(std::move(out));
}

IndexSet IndexSet::complement(std::size_t d) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < d; ++j)
        if (!contains(j)) out.push_back(j);
    return IndexSet(std::move(out));
}

PairedDataset::PairedDataset(FeatureMatrix x_, FeatureMatrix x_knock_, Response y_)
    : x(std::move(x_)), x_knock(std::move(x_knock_)), y(std::move(y_)) {
    require(x.rows() == x_knock.rows() && x.cols() == x_knock.cols(), ErrorKind::dimension,
            "knockoff matrix shape differs from feature matrix");
    require(y.size() == x.rows(), ErrorKind::dimension, "response length differs from sample count");
}

Region::Region(std::vector<double> c, double r) : center(std::move(c)), radius(r) {
    require(radius > 0.0, ErrorKind::config, "region radius must be positive");
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorKind::dimension,
            "sup_distance: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

bool region_contains(const Region& region, std::span<const double> point) {
    return sup_distance(region.center, point) <= region.radius;
}

std::vector<std::size_t> region_rows(const PairedDataset& data, const Region& region) {
    require(region.dim() == data.cols(), ErrorKind::dimension, "region dimension differs from feature count");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < data.rows(); ++i)
        if (region_contains(region, data.x.row(i)) && region_contains(region, data.x_knock.row(i))) keep.push_back(i);
    return keep;
}

FeatureMatrix take_rows(const FeatureMatrix& m, std::span<const std::size_t> rows) {
    std::vector<double> v;
    v.reserve(rows.size() * m.cols());
    for (auto i : rows) {
        auto r = m.row(i);
        v.insert(v.end(), r.begin(), r.end());
    }
    return FeatureMatrix(rows.size(), m.cols(), std::move(v));
}

Response take_rows(const Response& y, std::span<const std::size_t> rows) {
    Response out;
    out.reserve(rows.size());
    for (auto i : rows) out.push_back(y[i]);
    return out;
}

PairedDataset subsample_region(const PairedDataset& data, const Region& region) {
    const auto keep = region_rows(data, region);
    return PairedDataset(take_rows(data.x, keep), take_rows(data.x_knock, keep), take_rows(data.y, keep));
}

PairedDataset swap_columns(const PairedDataset& data, const IndexSet& swapped) {
    require(swapped.max_plus_one() <= data.cols(), ErrorKind::contract, "swap index out of range");
    PairedDataset out = data;
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (auto j : swapped) std::swap(out.x(i, j), out.x_knock(i, j));
    return out;
}

} // namespace lko
