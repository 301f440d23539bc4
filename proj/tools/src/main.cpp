#include <iostream>

#include "subdiff_cli/cli.hpp"

int main(int argc, char** argv) {
  return subdiff::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
