#include <iostream>
#include <string>
#include <vector>

#include "twocopy/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return twocopy::cli::run(args, std::cout, std::cerr);
}
