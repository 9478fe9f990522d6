#pragma once

#include <stdexcept>
#include <string>

namespace confel {

// A 4n-dimensional coordinate frame split into four blocks of size n.
// Coordinate k lives in block k/n. Indices 4n .. 8n-1 are reserved for the
// formal velocity symbols paired with the coordinates, in the same order.
class Chart {
 public:
  explicit Chart(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Chart: block size must be positive");
  }

  int block_size() const { return n_; }
  int dim() const { return 4 * n_; }

  int block(int k) const {
    check_index(k);
    return k / n_;
  }
  int offset_in_block(int k) const {
    check_index(k);
    return k % n_;
  }

  int velocity_index(int k) const {
    check_index(k);
    return dim() + k;
  }
  bool is_velocity_index(int idx) const { return idx >= dim() && idx < 2 * dim(); }

  std::string label(int k) const {
    check_index(k);
    return "x" + std::to_string(k);
  }

  void check_index(int k) const {
    if (k < 0 || k >= dim())
      throw std::out_of_range("Chart: coordinate index " + std::to_string(k) +
                              " outside [0, " + std::to_string(dim()) + ")");
  }

 private:
  int n_;
};

}  // namespace confel
