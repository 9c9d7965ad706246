#include "qgnls/cli.hpp"

int main(int argc, char** argv) { return qgnls::cli::run(argc, argv); }
