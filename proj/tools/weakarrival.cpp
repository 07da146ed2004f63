#include <iostream>

#include "weakarrival/cli/commands.hpp"

int main(int argc, char** argv) { return weakarrival::cli::run_cli(argc, argv, std::cout, std::cerr); }
