#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dremix {

/// Inputs with incompatible shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A signal or integration produced a non-finite value at a known sample.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t sample)
      : std::runtime_error(what + " (sample " + std::to_string(sample) + ")"), sample_(sample) {}

  std::size_t sample() const { return sample_; }

 private:
  std::size_t sample_;
};

/// Raised by left_annihilator when the input lacks full column rank.
class RankDeficient : public std::runtime_error {
 public:
  explicit RankDeficient(long rank)
      : std::runtime_error("matrix is rank deficient (numerical rank " + std::to_string(rank) + ")"),
        rank_(rank) {}

  long rank() const { return rank_; }

 private:
  long rank_;
};

/// Scenario configuration problems. Collects every problem found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out = "invalid scenario:";
    for (const auto& s : p) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace dremix
