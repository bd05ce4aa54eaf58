#include "jgl/cli.hpp"

int main(int argc, char** argv) { return jgl::cli::main(argc, argv); }
