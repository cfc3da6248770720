#include <iostream>

#include "tees/cli.hpp"

int main(int argc, char** argv) {
  return tees::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
