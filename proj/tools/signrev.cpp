#include "signrev/cli.hpp"

int main(int argc, char** argv) { return signrev::run_cli(argc, argv); }
