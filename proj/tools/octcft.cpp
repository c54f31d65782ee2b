#include <iostream>

#include "octcft/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return octcft::run_cli(args, std::cout, std::cerr);
}
