#include <iostream>

#include "synmarket/cli.hpp"

int main(int argc, char** argv) { return synmarket::run_cli(argc, argv, std::cout, std::cerr); }
