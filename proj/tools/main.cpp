#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return freqsketch::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
