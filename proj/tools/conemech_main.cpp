#include <iostream>

#include "conemech/cli.hpp"

int main(int argc, char** argv) { return conemech::run_cli(argc, argv, std::cout, std::cerr); }
