#include <iostream>

#include "attnloc/cli.hpp"

int main(int argc, char** argv) { return attnloc::run_cli(argc, argv, std::cout, std::cerr); }
