#include <iostream>

#include "learnpath/cli.hpp"

int main(int argc, char** argv) { return learnpath::run_cli(argc, argv, std::cout, std::cerr); }
