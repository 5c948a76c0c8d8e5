#include "exprkg/cli.hpp"

int main(int argc, char** argv) { return exprkg::cli::run_cli(argc, argv); }
