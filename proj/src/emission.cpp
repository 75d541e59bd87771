#include "pinyinasr/emission.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "pinyinasr/errors.hpp"
#include "pinyinasr/ngram.hpp"

namespace pinyinasr {

EmissionMatrix::EmissionMatrix(std::vector<std::string> unit_labels, std::size_t blank_index,
                               std::vector<double> log10_probs)
    : labels_(std::move(unit_labels)), blank_(blank_index), data_(std::move(log10_probs)) {
  if (labels_.empty()) throw MalformedEmissions("emission matrix needs at least one unit");
  if (blank_ > labels_.size()) throw MalformedEmissions("blank index out of range");
  if (data_.empty() || data_.size() % classes() != 0)
    throw MalformedEmissions("emission data is not a whole number of rows");
  frames_ = data_.size() / classes();
  for (std::size_t t = 0; t < frames_; ++t) {
    double sum = 0.0;
    for (double lp : row(t)) {
      if (std::isnan(lp) || lp > 1e-9) throw MalformedEmissions("frame " + std::to_string(t) + " has an invalid log probability");
      sum += std::pow(10.0, lp);
    }
    if (std::abs(sum - 1.0) > kRowTolerance)
      throw MalformedEmissions("frame " + std::to_string(t) + " sums to " + format_double(sum));
  }
}

EmissionMatrix read_emissions(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return;
    }
    throw MalformedEmissions(std::string("missing ") + what);
  };

  next_line("header");
  std::istringstream header(line);
  std::size_t frames = 0, units = 0, blank = 0;
  if (!(header >> frames >> units >> blank) || frames == 0 || units == 0)
    throw MalformedEmissions("header must be 'T V blank_index' with T, V >= 1");

  next_line("unit labels");
  std::istringstream label_line(line);
  std::vector<std::string> labels;
  for (std::string tok; label_line >> tok;) labels.push_back(tok);
  if (labels.size() != units)
    throw MalformedEmissions("expected " + std::to_string(units) + " unit labels, got " +
                             std::to_string(labels.size()));

  std::vector<double> data;
  data.reserve(frames * (units + 1));
  for (std::size_t t = 0; t < frames; ++t) {
    next_line("frame rows");
    std::istringstream row(line);
    std::size_t n = 0;
    for (std::string tok; row >> tok; ++n) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw MalformedEmissions("frame " + std::to_string(t) + ": bad number '" + tok + "'");
      data.push_back(v);
    }
    if (n != units + 1)
      throw MalformedEmissions("frame " + std::to_string(t) + " has " + std::to_string(n) +
                               " values, expected " + std::to_string(units + 1));
  }
  return EmissionMatrix(std::move(labels), blank, std::move(data));
}

void write_emissions(std::ostream& out, const EmissionMatrix& e) {
  out << e.frames() << ' ' << e.units() << ' ' << e.blank() << '\n';
  for (std::size_t u = 0; u < e.units(); ++u) out << (u ? " " : "") << e.unit_labels()[u];
  out << '\n';
  for (std::size_t t = 0; t < e.frames(); ++t) {
    const auto row = e.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ' ';
      if (std::isinf(row[c]))
        out << "-inf";
      else
        out << format_double(row[c]);
    }
    out << '\n';
  }
}

}  // namespace pinyinasr
