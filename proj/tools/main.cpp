#include <iostream>

#include "jca_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jca::cli::run(args, std::cout, std::cerr);
}
