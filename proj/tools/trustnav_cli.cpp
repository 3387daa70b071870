#include <iostream>

#include "trustnav/harness/commands.hpp"

int main(int argc, char** argv) { return trustnav::harness::run_cli(argc, argv, std::cout, std::cerr); }
