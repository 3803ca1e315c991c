#include "goldeneq/cli.hpp"

int main(int argc, char** argv) { return goldeneq::cli::run(argc, argv); }
