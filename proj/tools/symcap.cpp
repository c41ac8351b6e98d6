#include <iostream>
#include <string>
#include <vector>

#include "symcap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return symcap::cli::run(args, std::cout, std::cerr);
}
