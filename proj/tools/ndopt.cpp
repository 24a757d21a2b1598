#include "ndopt/cli.hpp"

int main(int argc, char** argv) { return ndopt::cli::run(argc, argv); }
