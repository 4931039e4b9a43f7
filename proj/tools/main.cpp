#include "cli.hpp"

int main(int argc, char** argv) { return sparsekern::cli::run(argc, argv); }
