#include "stirap/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return stirap::cli::run(argc, argv, std::cout, std::cerr); }
