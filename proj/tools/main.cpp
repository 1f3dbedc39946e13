#include "steerlab/cli.hpp"

int main(int argc, char** argv) { return steerlab::cli_main(argc, argv); }
