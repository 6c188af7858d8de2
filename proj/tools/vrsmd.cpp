#include "vrsmd/cli_app.hpp"

int main(int argc, char** argv) { return vrsmd::cli::vrsmd_main(argc, argv); }
