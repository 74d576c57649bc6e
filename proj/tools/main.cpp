#include <iostream>

#include "ncprox/harness/cli.hpp"

int main(int argc, char** argv) { return ncprox::harness::cli_main(argc, argv, std::cout, std::cerr); }
