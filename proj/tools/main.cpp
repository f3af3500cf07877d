#include <iostream>
#include <vector>

#include "otgrid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return otgrid::cli::run(args, std::cout, std::cerr);
}
