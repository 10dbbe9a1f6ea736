#include <iostream>

#include "qapbb/cli.hpp"

int main(int argc, char** argv) { return qapbb::run_cli(argc, argv, std::cout, std::cerr); }
