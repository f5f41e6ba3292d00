#include <iostream>
#include <string>
#include <vector>

#include "ransd/app/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ransd::app::run(args, std::cout, std::cerr);
}
