#include "copulaboost/cli.hpp"

int main(int argc, char** argv) { return cpb::cli_main(argc, argv); }
