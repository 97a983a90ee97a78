#include <iostream>

#include "probevol/cli.hpp"

int main(int argc, char** argv) { return probevol::run_cli(argc, argv, std::cout, std::cerr); }
