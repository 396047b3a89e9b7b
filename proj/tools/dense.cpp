#include <iostream>
#include <string>
#include <vector>

#include "dense/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dense::cli::run(args, std::cout, std::cerr);
}
