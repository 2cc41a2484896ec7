#include "udsim/cli.hpp"

int main(int argc, char** argv) { return udsim::cli::run_main(argc, argv); }
