// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/parallel.hpp>

#include <cstdlib>
#include <string>

namespace multibaker {

int default_thread_count() {
    if (const char* env = std::getenv("MULTIBAKER_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace multibaker
