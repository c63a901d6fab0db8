#include "exactq/cli.hpp"

int main(int argc, char** argv) { return exactq::run_cli(argc, argv); }
