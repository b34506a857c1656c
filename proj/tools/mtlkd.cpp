#include <iostream>

#include "mtlkd/cli/commands.hpp"

int main(int argc, char** argv) {
  return mtlkd::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
