#include <iostream>

#include "dlam/cli.hpp"

int main(int argc, char** argv) { return dlam::cli::main(argc, argv, std::cout, std::cerr); }
