#include <iostream>

#include "electwit/cli.hpp"

int main(int argc, char** argv) { return electwit::run_cli(argc, argv, std::cout, std::cerr); }
