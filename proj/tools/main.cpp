#include <iostream>

#include "berkson/cli.hpp"

int main(int argc, char** argv) { return berkson::run(argc, argv, std::cout, std::cerr); }
