#include <iostream>

#include "mm1/cli.hpp"

int main(int argc, char** argv) { return mm1::cli::run(argc, argv, std::cout, std::cerr); }
