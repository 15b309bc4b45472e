#include "rtquench/cli/commands.hpp"

int main(int argc, char** argv) { return rtq::cli::run(argc, argv); }
