#include <iostream>
#include <string>
#include <vector>

#include "nilkill/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return nilkill::cli::run(args, std::cout, std::cerr);
}
