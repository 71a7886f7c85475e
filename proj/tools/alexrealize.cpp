#include <iostream>

#include "alexrealize/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return alexrealize::run_cli(args, std::cout, std::cerr);
}
