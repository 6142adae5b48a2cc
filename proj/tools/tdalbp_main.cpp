#include <iostream>

#include "tdalbp/cli.hpp"

int main(int argc, char** argv) { return tdalbp::cli::run(argc, argv, std::cout, std::cerr); }
