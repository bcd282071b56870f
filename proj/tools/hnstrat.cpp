#include <iostream>

#include "hnstrat/cli.hpp"

int main(int argc, char** argv) { return hnstrat::cli::run_cli(argc, argv, std::cout, std::cerr); }
