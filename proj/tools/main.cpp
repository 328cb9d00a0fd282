#include "fanolab/cli.hpp"

int main(int argc, char** argv) { return fanolab::cli::dispatch(argc, argv); }
