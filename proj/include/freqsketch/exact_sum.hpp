#pragma once

#include <vector>

namespace freqsketch {

// Error-free floating point accumulator (Shewchuk partials). value() is the
// correctly rounded sum, so the result does not depend on the order in which
// terms were added.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  double value() const;

 private:
  std::vector<double> partials_;
};

}  // namespace freqsketch
