// SPDX-License-Identifier: Apache-2.0
#include "primefam_cli/cli.hpp"

int main(int argc, char** argv) { return primefam::cli::run_cli(argc, argv); }
