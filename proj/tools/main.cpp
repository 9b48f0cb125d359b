#include <iostream>

#include "dpathsim/cli.hpp"

int main(int argc, char** argv) { return dpathsim::cli::run(argc, argv, std::cout, std::cerr); }
