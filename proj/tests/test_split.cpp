#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"
#include "crfid/split.hpp"

using namespace crfid;

namespace {

// Full-factorial labels: 8 ids x 3 caps x 4 positions x 5 cases x n readings.
std::vector<TagLabel> factorial_labels(int readings) {
    const double caps[] = {0.1, 0.3, 0.8};
    std::vector<TagLabel> labels;
    for (int id = 0; id < 8; ++id)
        for (double cap : caps)
            for (int p = 0; p < 4; ++p)
                for (int c = 0; c < 5; ++c)
                    for (int r = 0; r < readings; ++r) {
                        TagLabel l;
                        l.tag_id = id;
                        l.capacitance_pf = cap;
                        l.position = static_cast<Position>(p);
                        l.deformation = static_cast<Deformation>(c);
                        l.reading = r;
                        labels.push_back(l);
                    }
    return labels;
}

} // namespace

TEST_CASE("split_count rounds half away from zero") {
    CHECK(split_count(20, 0.2) == 4);
    CHECK(split_count(16, 0.25) == 4);
    CHECK(split_count(5, 0.2) == 1);
    CHECK(split_count(7, 0.2) == 1);  // 1.4 -> 1
    CHECK(split_count(8, 0.2) == 2);  // 1.6 -> 2
    CHECK(split_count(5, 0.25) == 1); // 1.25 -> 1
    CHECK(split_count(6, 0.25) == 2); // 1.5 rounds up
}

TEST_CASE("the full dataset splits 5760/1920/1920") {
    const std::vector<TagLabel> labels = factorial_labels(20);
    REQUIRE(labels.size() == 9600);
    const Split s = stratified_split(labels, 42);
    CHECK(s.train.size() == 5760);
    CHECK(s.val.size() == 1920);
    CHECK(s.test.size() == 1920);

    // disjoint and exhaustive
    std::set<int> all;
    for (const auto* part : {&s.train, &s.val, &s.test})
        for (int i : *part) all.insert(i);
    CHECK(all.size() == 9600);

    // per-group 12/4/4
    const auto per_group = [&](const std::vector<int>& part) {
        std::set<int> groups;
        for (int i : part) groups.insert(i / 20); // factorial order: 20 readings per group
        return groups.size();
    };
    CHECK(per_group(s.test) == 480);
    std::vector<int> count(480, 0);
    for (int i : s.test) ++count[i / 20];
    for (int c : count) CHECK(c == 4);
}

TEST_CASE("a 20-reading group yields 4 test, 4 validation, 12 train rows") {
    const std::vector<TagLabel> labels = factorial_labels(20);
    const Split s = stratified_split(labels, 1);
    std::vector<int> in_test(9600, 0), in_val(9600, 0);
    for (int i : s.test) in_test[i] = 1;
    for (int i : s.val) in_val[i] = 1;
    int t = 0, v = 0, tr = 0;
    for (int i = 0; i < 20; ++i) {
        t += in_test[i];
        v += in_val[i];
        tr += 1 - in_test[i] - in_val[i];
    }
    CHECK(t == 4);
    CHECK(v == 4);
    CHECK(tr == 12);
}

TEST_CASE("per-group sizes stay within one row of the exact fractions") {
    for (int readings : {5, 7, 9, 13, 17}) {
        const std::vector<TagLabel> labels = factorial_labels(readings);
        const Split s = stratified_split(labels, 3);
        std::vector<int> test_n(480, 0), val_n(480, 0), train_n(480, 0);
        for (int i : s.test) ++test_n[i / readings];
        for (int i : s.val) ++val_n[i / readings];
        for (int i : s.train) ++train_n[i / readings];
        const double want_test = 0.2 * readings;
        const double want_val = 0.25 * (readings - split_count(readings, 0.2));
        for (int g = 0; g < 480; ++g) {
            CHECK(std::abs(test_n[g] - want_test) <= 1.0);
            CHECK(std::abs(val_n[g] - want_val) <= 1.0);
            CHECK(test_n[g] + val_n[g] + train_n[g] == readings);
            CHECK(train_n[g] >= 1);
        }
    }
}

TEST_CASE("splits are deterministic in the seed and sorted") {
    const std::vector<TagLabel> labels = factorial_labels(6);
    const Split a = stratified_split(labels, 99);
    const Split b = stratified_split(labels, 99);
    const Split c = stratified_split(labels, 100);
    CHECK(a.train == b.train);
    CHECK(a.val == b.val);
    CHECK(a.test == b.test);
    CHECK(a.test != c.test);
    CHECK(std::is_sorted(a.train.begin(), a.train.end()));
    CHECK(std::is_sorted(a.val.begin(), a.val.end()));
    CHECK(std::is_sorted(a.test.begin(), a.test.end()));
}

TEST_CASE("groups below five readings are rejected") {
    const std::vector<TagLabel> ok = factorial_labels(5);
    CHECK_NOTHROW(stratified_split(ok, 5));
    const std::vector<TagLabel> thin = factorial_labels(4);
    CHECK_THROWS_AS(stratified_split(thin, 5), DataError);
    CHECK_THROWS_AS(stratified_split({}, 5), DataError);
}
