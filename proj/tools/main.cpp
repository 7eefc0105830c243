#include "cli_app.hpp"

int main(int argc, char** argv) { return ctic::run_cli(argc, argv); }
