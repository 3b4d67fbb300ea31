#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "freqsketch/frequency.hpp"

namespace freqsketch {

// `key<TAB>value` per line; blank lines and lines starting with '#' are
// skipped. Malformed lines raise Error(parse_error) with the line number.
std::vector<Element> read_elements(std::istream& in, const std::string& source = "<stream>");
std::vector<Element> read_elements_file(const std::string& path);

FrequencyVector read_frequencies_file(const std::string& path);

// Rank order, shortest round-trip decimal for each value.
void write_frequencies(std::ostream& out, const FrequencyVector& w);

std::string format_double(double x);

}  // namespace freqsketch
