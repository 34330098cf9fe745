#include "crfid/cli.hpp"

int main(int argc, char** argv) { return crfid::cli::run(argc, argv); }
