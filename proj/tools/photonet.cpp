#include <iostream>
#include <string>
#include <vector>

#include "photonet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return photonet::run_cli(args, std::cout, std::cerr);
}
