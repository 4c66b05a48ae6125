#include <iostream>

#include "flipfair/cli.hpp"

int main(int argc, char** argv) { return flipfair::run_cli(argc, argv, std::cout, std::cerr); }
