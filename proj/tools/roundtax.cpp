#include <iostream>

#include "roundtax/cli.hpp"

int main(int argc, char** argv) { return roundtax::run_cli(argc, argv, std::cout, std::cerr); }
