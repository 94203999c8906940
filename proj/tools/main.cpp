#include "riskab/cli_main.hpp"

int main(int argc, char** argv) { return riskab::cli::cli_main(argc, argv); }
