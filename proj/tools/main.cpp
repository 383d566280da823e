#include <iostream>

#include "multiseg/cli.hpp"

int main(int argc, char** argv) {
  return multiseg::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
