#include "mttspo/cli.hpp"

int main(int argc, char** argv) { return mttspo::cli::run(argc, argv); }
