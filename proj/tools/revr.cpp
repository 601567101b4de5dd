#include <iostream>

#include "revr/cli.hpp"

int main(int argc, char** argv) { return revr::run_cli(argc, argv, std::cout, std::cerr); }
