#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace pairs {

// Dense rows x cols array stored column by column, so each column (one
// security, one pair) is a contiguous span.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[c * rows_ + r];
    }
    const T& operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[c * rows_ + r];
    }

    std::span<T> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
    std::span<const T> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

    // Rows [first, last) of every column.
    Grid slice_rows(std::size_t first, std::size_t last) const {
        assert(first <= last && last <= rows_);
        Grid out(last - first, cols_);
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = first; r < last; ++r) out(r - first, c) = (*this)(r, c);
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = Grid<double>;

}  // namespace pairs
