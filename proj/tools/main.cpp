#include "poismix/cli.hpp"

int main(int argc, char** argv) { return poismix::cli::main(argc, argv); }
