#include <iostream>

#include "khs/cli.hpp"

int main(int argc, char** argv) { return khs::run_cli(argc, argv, std::cout, std::cerr); }
