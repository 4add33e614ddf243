#include "vqls/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return vqls::cli::run(argc, argv, std::cout, std::cerr); }
