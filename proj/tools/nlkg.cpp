#include "cli.hpp"

int main(int argc, char** argv) { return nlkg::cli::run(argc, argv); }
