#include <iostream>

#include "heatctl/cli.hpp"

int main(int argc, char** argv) { return heatctl::run_cli(argc, argv, std::cout, std::cerr); }
