#include <iostream>
#include <string>
#include <vector>

#include "elq/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return elq::run_cli(args, std::cout, std::cerr);
}
