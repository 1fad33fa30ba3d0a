#include "egaa/bench.hpp"

int main(int argc, char** argv) { return egaa::cli_main(argc, argv); }
