#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return reimpute::cli::run(argc, argv, std::cout, std::cerr); }
