#include <iostream>
#include <string>
#include <vector>

#include "central_approx/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return central_approx::run_cli(args, std::cout, std::cerr);
}
