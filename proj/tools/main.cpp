#include "ergodix/runner.hpp"

int main(int argc, char** argv) { return ergodix::cli_main(argc, argv); }
