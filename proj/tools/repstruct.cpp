#include <iostream>

#include "repstruct/cli.h"

int main(int argc, char** argv) { return repstruct::run_cli(argc, argv, std::cout, std::cerr); }
