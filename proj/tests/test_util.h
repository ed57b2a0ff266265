// Copyright 2026 The msi-workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MSI_TEST_UTIL_H
#define MSI_TEST_UTIL_H

#include <random>

#include "msi/gf2.h"

namespace msi {

inline BitMatrix random_matrix(size_t rows, size_t cols, double density, std::mt19937_64 &rng) {
    std::bernoulli_distribution bit(density);
    BitMatrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            if (bit(rng)) m.set(r, c, true);
        }
    }
    return m;
}

}  // namespace msi

#endif
