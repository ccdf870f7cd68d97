#include <iostream>

#include "qdent/cli.hpp"

int main(int argc, char** argv) { return qdent::cli::run(argc, argv, std::cout, std::cerr); }
