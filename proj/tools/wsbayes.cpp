#include <iostream>

#include "wsbayes/cli.hpp"

int main(int argc, char** argv) { return wsbayes::cli::run(argc, argv, std::cout, std::cerr); }
