#include <iostream>

#include "colim/cli.hpp"

int main(int argc, char** argv) { return colim::cli::run(argc, argv, std::cout, std::cerr); }
