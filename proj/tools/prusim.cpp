#include <iostream>

#include "prusim/cli.hpp"

int main(int argc, char** argv) { return prusim::run_cli(argc, argv, std::cout, std::cerr); }
