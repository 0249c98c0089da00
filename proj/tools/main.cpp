#include <iostream>
#include <string>
#include <vector>

#include "stepbayes/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stepbayes::cli::main(args, std::cout, std::cerr);
}
