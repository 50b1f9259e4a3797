#include "funcmod/cli.hpp"

int main(int argc, char** argv) { return funcmod::run_cli(argc, argv); }
