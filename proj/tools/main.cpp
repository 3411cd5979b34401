#include "cli.hpp"

int main(int argc, char** argv) { return l0fgl::cli::run(argc, argv); }
