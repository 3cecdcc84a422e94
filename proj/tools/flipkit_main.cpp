#include <iostream>

#include "flipkit/cli.hpp"

int main(int argc, char** argv) { return flipkit::cli::run(argc, argv, std::cout, std::cerr); }
