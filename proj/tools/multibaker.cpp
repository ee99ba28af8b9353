// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/cli/commands.hpp>

int main(int argc, char** argv) { return multibaker::cli::run_main(argc, argv); }
