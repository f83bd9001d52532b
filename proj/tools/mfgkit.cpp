// mfgkit.cpp — Command-line frontend

#include "mfgkit/cli.hpp"

int main(int argc, char** argv) { return mfgkit::cli::main(argc, argv); }
