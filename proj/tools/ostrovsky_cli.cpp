#include <iostream>

#include "ostrovsky/cli.hpp"

int main(int argc, char** argv) { return ostrovsky::run(argc, argv, std::cout, std::cerr); }
