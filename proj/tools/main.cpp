#include "newsprop/cli.hpp"

int main(int argc, char** argv) { return newsprop::cli_main(argc, argv); }
