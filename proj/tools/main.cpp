#include "corelr/cli.hpp"

int main(int argc, char** argv) { return corelr::run_cli(argc, argv); }
