#include "arcane/cli/app.hpp"

int main(int argc, char** argv) { return arcane::cli::run(argc, argv); }
