#include "freqsketch/tsv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "freqsketch/error.hpp"

namespace freqsketch {

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::vector<Element> read_elements(std::istream& in, const std::string& source) {
  std::vector<Element> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::parse_error, source + ":" + std::to_string(line_no) + ": " + why);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail("expected key<TAB>value");
    const std::string_view value_text(line.data() + tab + 1, line.size() - tab - 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size() || value_text.empty()) {
      fail("malformed value '" + std::string(value_text) + "'");
    }
    if (!(value >= 0.0) || std::isinf(value)) fail("value must be finite and nonnegative");
    out.push_back({line.substr(0, tab), value});
  }
  return out;
}

std::vector<Element> read_elements_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  return read_elements(in, path);
}

FrequencyVector read_frequencies_file(const std::string& path) {
  return aggregate(read_elements_file(path));
}

void write_frequencies(std::ostream& out, const FrequencyVector& w) {
  for (const auto& kf : w) out << kf.key << '\t' << format_double(kf.frequency) << '\n';
}

}  // namespace freqsketch
