#include "qcarpet/cli/commands.hpp"

int main(int argc, char** argv) { return qcarpet::cli::main_entry(argc, argv); }
