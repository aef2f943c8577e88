#include <iostream>

#include "reparse/cli.hpp"

int main(int argc, char** argv) { return reparse::run_cli(argc, argv, std::cout, std::cerr); }
