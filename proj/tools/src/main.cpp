#include "cli.hpp"

int main(int argc, char** argv) { return qgraph::cli::run(argc, argv); }
