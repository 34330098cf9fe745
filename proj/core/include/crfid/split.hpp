#pragma once

#include <cstdint>
#include <vector>

#include "crfid/siggen.hpp"

namespace crfid {

struct Split {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

// 20% test, then 25% of the remainder as validation, within each
// (tag, capacitance, position, case) group. Fractions round half up; each
// group needs at least 5 readings so every partition is non-empty.
Split stratified_split(const std::vector<TagLabel>& labels, std::uint64_t seed);

// round(frac * n) with ties away from zero, used by the split arithmetic.
int split_count(int n, double frac);

} // namespace crfid
