#include "tsnet/cli.hpp"

int main(int argc, char** argv) { return tsnet::cli::run(argc, argv); }
