#include <iostream>

#include "infopatch/cli.hpp"

int main(int argc, char** argv) { return infopatch::cli::run(argc, argv, std::cout, std::cerr); }
