#include "impatient/cli.hpp"

int main(int argc, char** argv) { return impatient::cli::run(argc, argv); }
