#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return pmf::cli::run_cli(argc, argv, std::cout, std::cerr); }
