#include <iostream>

#include "h8/cli.hpp"

int main(int argc, char** argv) { return h8::cli::run(argc, argv, std::cout, std::cerr); }
