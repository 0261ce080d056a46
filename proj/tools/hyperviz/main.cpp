#include <iostream>

#include "hyperviz/cli.hpp"

int main(int argc, char** argv) { return hyperviz::cli::run(argc, argv, std::cout, std::cerr); }
