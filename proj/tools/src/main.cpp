#include "mfs/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return mfs::cli::run(argc, argv, std::cout, std::cerr); }
