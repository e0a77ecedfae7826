#include <iostream>

#include "qfog/cli/commands.hpp"

int main(int argc, char** argv) {
  return qfog::cli::run_cli(argc, argv, std::cout, std::cerr);
}
