#include "symreg/cli.hpp"

int main(int argc, char** argv) { return symreg::run_cli(argc, argv); }
