#include <iostream>
#include <string>
#include <vector>

#include "cflab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cflab::cli::run(args, std::cout, std::cerr);
}
