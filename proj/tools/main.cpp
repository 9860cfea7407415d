#include "commands.hpp"

int main(int argc, char** argv) { return hsfuse::cli::run_cli(argc, argv); }
