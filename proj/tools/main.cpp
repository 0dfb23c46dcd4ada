// SPDX-License-Identifier: MIT

#include <iostream>
#include <string>
#include <vector>

#include "cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sixdof::cli::run(args, std::cout, std::cerr);
}
