#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sgfem::tools::run(argc, argv, std::cout, std::cerr); }
