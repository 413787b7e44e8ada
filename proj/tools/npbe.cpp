#include "npbe/cli.hpp"

int main(int argc, char** argv) { return npbe::cli::dispatch(argc, argv); }
