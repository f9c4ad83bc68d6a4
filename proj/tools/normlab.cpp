#include "nl/cli.hpp"

int main(int argc, char** argv) { return nl::cli::main_entry(argc, argv); }
