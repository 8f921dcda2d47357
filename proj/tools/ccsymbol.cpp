#include "ccsymbol/cli.hpp"

int main(int argc, char** argv) { return ccsymbol::cli::run(argc, argv, std::cout, std::cerr); }
