#include "tqd/cli.hpp"

int main(int argc, char** argv) { return tqd::run_cli(argc, argv); }
