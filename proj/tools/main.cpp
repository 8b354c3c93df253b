#include "orlicz/cli.hpp"

int main(int argc, char** argv) { return orlicz::cli::run_command(argc, argv); }
