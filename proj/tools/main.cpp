#include "cli.hpp"

int main(int argc, char** argv) { return usnl::cli::run(argc, argv); }
