#include "pleg/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return pleg::cli::main(argc, argv, std::cout, std::cerr);
}
