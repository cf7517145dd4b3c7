#include "nlb/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nlb::run_cli(argc, argv, std::cout, std::cerr); }
