#include <iostream>
#include <string>
#include <vector>

#include "rqs/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return rqs::cli::execute(args, std::cout, std::cerr);
}
