#include <iostream>

#include "mapf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mapf::run_cli(args, std::cout, std::cerr);
}
