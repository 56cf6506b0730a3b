#include "csa/cli.hpp"

int main(int argc, char** argv) { return csa::cli::run(argc, argv); }
