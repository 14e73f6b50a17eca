// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include <iostream>

#include "hpdwave/cli.hpp"

int main(int argc, char** argv) { return hpdwave::cli::run(argc, argv, std::cout, std::cerr); }
