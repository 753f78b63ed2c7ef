#include "toleq/cli.hpp"

int main(int argc, char** argv) { return toleq::cli::run(argc, argv); }
