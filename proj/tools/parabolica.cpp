#include <iostream>

#include "parabolica/cli.hpp"

int main(int argc, char** argv) { return parabolica::cli::run(argc, argv, std::cout, std::cerr); }
