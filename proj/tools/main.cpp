#include "faa/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return faa::run_cli(argc, argv, std::cout, std::cerr); }
