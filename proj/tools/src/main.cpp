#include <iostream>

#include "ucompare_cli/cli.hpp"

int main(int argc, char** argv) {
  return ucompare::cli::run(argc, argv, std::cout, std::cerr);
}
