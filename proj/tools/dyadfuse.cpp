#include "dyadfuse/cli.hpp"

int main(int argc, char** argv) { return dyadfuse::cli::main(argc, argv); }
