#include <iostream>

#include "bklab/cli.hpp"

int main(int argc, char** argv) { return bklab::cli::run(argc, argv, std::cout, std::cerr); }
