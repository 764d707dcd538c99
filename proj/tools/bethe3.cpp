#include <bethe3/cli.hpp>

int main(int argc, char** argv) { return bethe3::cli::main(argc, argv); }
