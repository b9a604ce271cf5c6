#include <iostream>

#include "qchoc/cli.hpp"

int main(int argc, char** argv) { return qchoc::cli::main(argc, argv, std::cout, std::cerr); }
