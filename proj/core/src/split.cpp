#include "crfid/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

int split_count(int n, double frac) {
    return static_cast<int>(std::floor(frac * n + 0.5));
}

Split stratified_split(const std::vector<TagLabel>& labels, std::uint64_t seed) {
    if (labels.empty()) throw DataError("split: empty dataset");

    using Key = std::tuple<int, double, int, int>;
    std::map<Key, std::vector<int>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const TagLabel& l = labels[i];
        groups[{l.tag_id, l.capacitance_pf, position_index(l.position), case_index(l.deformation)}]
            .push_back(static_cast<int>(i));
    }

    Split out;
    std::uint64_t group_counter = 0;
    for (auto& [key, rows] : groups) {
        const int n = static_cast<int>(rows.size());
        if (n < 5)
            throw DataError("split: group with " + std::to_string(n) +
                            " readings; at least 5 are required");
        const int n_test = split_count(n, 0.2);
        const int n_val = split_count(n - n_test, 0.25);

        Rng rng(derive_seed(seed, {0x5B17, group_counter++}));
        rng.shuffle(rows);
        out.test.insert(out.test.end(), rows.begin(), rows.begin() + n_test);
        out.val.insert(out.val.end(), rows.begin() + n_test, rows.begin() + n_test + n_val);
        out.train.insert(out.train.end(), rows.begin() + n_test + n_val, rows.end());
    }

    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

} // namespace crfid
