#include "pwlstl/commands.hpp"

int main(int argc, char** argv) { return pwlstl::run_cli(argc, argv); }
