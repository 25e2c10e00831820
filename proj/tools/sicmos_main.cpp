#include <iostream>

#include "sicmos/cli.hpp"

int main(int argc, char** argv) { return sicmos::cli::run(argc, argv, std::cout, std::cerr); }
