#include "cli.hpp"

int main(int argc, char** argv) { return iontherm::cli_main(argc, argv); }
