#include <iostream>

#include "solitrain/commands.hpp"

int main(int argc, char** argv) { return solitrain::cli::run_cli(argc, argv, std::cout, std::cerr); }
