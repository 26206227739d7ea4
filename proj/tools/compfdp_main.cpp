#include <iostream>

#include "compfdp/cli.hpp"

int main(int argc, char** argv) { return compfdp::cli::dispatch(argc, argv, std::cout, std::cerr); }
