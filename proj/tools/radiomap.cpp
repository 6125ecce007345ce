#include "radiomap/bench.hpp"

#include <iostream>

int main(int argc, char **argv) { return radiomap::cli_main(argc, argv, std::cout, std::cerr); }
