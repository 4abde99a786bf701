#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xline/core.hpp"

namespace xline {

/// Integer grid cell, addressed (col, row) like an image pixel (x, y).
struct Cell {
  int col = 0;
  int row = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
};

/// Dense row-major 2-D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw Error(ErrorKind::InvalidArgument, "negative grid dimension");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < rows_ && col < cols_; }
  bool contains(Cell c) const { return contains(c.row, c.col); }

  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }
  T& operator[](Cell c) { return at(c.row, c.col); }
  const T& operator[](Cell c) const { return at(c.row, c.col); }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(col);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// Labels maximal 4-connected groups of nonzero cells. Groups come out in
/// the row-major order of their first cell; cells inside a group are sorted
/// row-major.
template <typename T>
std::vector<std::vector<Cell>> label_4connected(const Grid<T>& mask) {
  std::vector<std::vector<Cell>> groups;
  Grid<std::uint8_t> seen(mask.rows(), mask.cols(), 0);
  std::vector<Cell> stack;
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask.at(r, c) || seen.at(r, c)) continue;
      std::vector<Cell> group;
      stack.push_back({c, r});
      seen.at(r, c) = 1;
      while (!stack.empty()) {
        const Cell cur = stack.back();
        stack.pop_back();
        group.push_back(cur);
        const Cell next[4] = {{cur.col + 1, cur.row}, {cur.col - 1, cur.row},
                              {cur.col, cur.row + 1}, {cur.col, cur.row - 1}};
        for (const Cell& n : next) {
          if (mask.contains(n) && mask[n] && !seen[n]) {
            seen[n] = 1;
            stack.push_back(n);
          }
        }
      }
      std::sort(group.begin(), group.end());
      groups.push_back(std::move(group));
    }
  }
  return groups;
}

}  // namespace xline
