#include "cli.hpp"

int main(int argc, char** argv) { return effbudget::cli::run(argc, argv); }
