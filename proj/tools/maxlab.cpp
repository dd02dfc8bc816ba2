#include "maxlab/cli.hpp"

int main(int argc, char** argv) { return maxlab::cli::run(argc, argv); }
