#include <iostream>

#include "emg/cli.hpp"

int main(int argc, char** argv) { return emg::run_cli(argc, argv, std::cout, std::cerr); }
