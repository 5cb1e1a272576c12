#include "commands.hpp"

int main(int argc, char** argv) { return hqflow::app::run_cli(argc, argv); }
