#include <iostream>

#include "cnls/commands.hpp"

int main(int argc, char** argv) { return cnls::run_cli(argc, argv, std::cout, std::cerr); }
