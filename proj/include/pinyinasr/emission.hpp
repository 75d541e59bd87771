#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pinyinasr {

/// T x (V+1) grid of log10 posteriors: V unit classes plus one blank class
/// at `blank()`. Unit labels are listed in class order, skipping the blank.
class EmissionMatrix {
 public:
  static constexpr double kRowTolerance = 1e-5;

  /// Throws MalformedEmissions if a row does not sum to 1 within
  /// kRowTolerance, T or V is zero, or the blank index is out of range.
  EmissionMatrix(std::vector<std::string> unit_labels, std::size_t blank_index,
                 std::vector<double> log10_probs);

  std::size_t frames() const { return frames_; }
  std::size_t classes() const { return labels_.size() + 1; }
  std::size_t units() const { return labels_.size(); }
  std::size_t blank() const { return blank_; }

  std::span<const double> row(std::size_t t) const {
    return {data_.data() + t * classes(), classes()};
  }
  double at(std::size_t t, std::size_t cls) const { return data_[t * classes() + cls]; }

  /// Label of a non-blank class.
  const std::string& label(std::size_t cls) const { return labels_[unit_index(cls)]; }
  const std::vector<std::string>& unit_labels() const { return labels_; }

  std::size_t unit_index(std::size_t cls) const { return cls < blank_ ? cls : cls - 1; }
  std::size_t class_of_unit(std::size_t unit) const { return unit < blank_ ? unit : unit + 1; }

 private:
  std::vector<std::string> labels_;
  std::size_t blank_;
  std::size_t frames_;
  std::vector<double> data_;
};

/// Header `T V blank_index`, the V unit labels on one line, then T rows of
/// V+1 log10 probabilities. "-inf" marks zero probability.
EmissionMatrix read_emissions(std::istream& in);
void write_emissions(std::ostream& out, const EmissionMatrix& e);

}  // namespace pinyinasr
