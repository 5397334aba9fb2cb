#include "quasiflow/cli.hpp"

int main(int argc, char** argv) { return qf::run_cli(argc, argv); }
