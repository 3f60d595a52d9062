#include <iostream>

#include "tfluct/cli.hpp"

int main(int argc, char** argv) { return tfluct::cli::dispatch(argc, argv, std::cout, std::cerr); }
