#include <iostream>

#include "lmrnn/cli.hpp"

int main(int argc, char** argv) { return lmrnn::run_cli(argc, argv, std::cout, std::cerr); }
