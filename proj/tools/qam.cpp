#include "qam/cli.hpp"

int main(int argc, char** argv) { return qam::cli::run({argv + 1, argv + argc}); }
