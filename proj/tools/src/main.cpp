#include "tract/cli.hpp"

int main(int argc, char** argv) { return tract::cli::run(argc, argv); }
