#include "ergolab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return ergolab::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
