#include "aud/cli.hpp"

int main(int argc, char** argv) { return aud::run_cli(argc, argv); }
