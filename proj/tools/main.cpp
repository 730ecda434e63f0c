#include <iostream>

#include "shapeci/cli.hpp"

int main(int argc, char** argv) { return shapeci::cli::run(argc, argv, std::cout, std::cerr); }
