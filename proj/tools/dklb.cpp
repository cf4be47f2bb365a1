#include <iostream>

#include "dklb/cli.hpp"

int main(int argc, char** argv) { return dklb::run(argc, argv, std::cout, std::cerr); }
