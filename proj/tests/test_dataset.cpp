#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "crisp/dataset.hpp"
#include "crisp/errors.hpp"

using namespace crisp;

TEST_CASE("parse_dataset reads labels and sparse features") {
    std::istringstream in("1,3 1:0.5 4:-2.0\n");
    const auto data = parse_dataset(in, 4, 5);
    REQUIRE(data.n() == 1);
    CHECK(data.labels(0, 0) == 1.0);
    CHECK(data.labels(0, 1) == 0.0);
    CHECK(data.labels(0, 2) == 1.0);
    CHECK(data.labels(0, 3) == 0.0);
    CHECK(data.features(0, 0) == 0.5);
    CHECK(data.features(0, 1) == 0.0);
    CHECK(data.features(0, 2) == 0.0);
    CHECK(data.features(0, 3) == -2.0);
    CHECK(data.features(0, 4) == 0.0);
}

TEST_CASE("parse_dataset accepts the lone-comma empty label list") {
    std::istringstream in(", 2:1.0\n");
    const auto data = parse_dataset(in, 2, 2);
    CHECK(data.labels(0, 0) == 0.0);
    CHECK(data.labels(0, 1) == 0.0);
    CHECK(data.features(0, 1) == 1.0);
}

TEST_CASE("parse_dataset rejects bad input with line numbers") {
    std::istringstream out_of_range("5 1:1.0\n");
    CHECK_THROWS_WITH_AS(parse_dataset(out_of_range, 4, 3),
                         "parse error at line 1: label index 5 out of range", ParseError);

    std::istringstream bad_feature("1 0:1.0\n");
    CHECK_THROWS_AS(parse_dataset(bad_feature, 4, 3), ParseError);

    std::istringstream malformed("1 2:abc\n");
    CHECK_THROWS_AS(parse_dataset(malformed, 4, 3), ParseError);

    std::istringstream duplicate("1,2 3:1.0\n2 1:0 1:2.0\n");
    CHECK_THROWS_WITH_AS(parse_dataset(duplicate, 4, 3),
                         "parse error at line 2: duplicate feature index 1", ParseError);

    std::istringstream nonfinite("1 1:inf\n");
    CHECK_THROWS_AS(parse_dataset(nonfinite, 4, 3), ParseError);
}

TEST_CASE("dataset round-trips through its text form") {
    std::istringstream in("1,3 1:0.5 4:-2.0\n, 2:1.25\n2 1:3.5 3:0.125\n");
    const auto data = parse_dataset(in, 3, 4);
    std::ostringstream text;
    write_dataset(data, text);
    std::istringstream again(text.str());
    const auto reparsed = parse_dataset(again, 3, 4);
    CHECK(reparsed.features == data.features);
    CHECK(reparsed.labels == data.labels);
}

namespace {

MultiLabelDataset tiny_dataset(std::size_t n, std::size_t c) {
    MultiLabelDataset data;
    data.features = Matrix(n, 2);
    data.labels = Matrix(n, c);
    for (std::size_t i = 0; i < n; ++i) {
        data.features(i, 0) = double(i);
        data.labels(i, i % c) = 1.0;
    }
    return data;
}

}  // namespace

TEST_CASE("split produces rounded sizes with remainder to train") {
    const auto data = tiny_dataset(10, 2);
    const auto parts = split(data, SplitSpec{0.8, 0.1, 0.1, 7});
    CHECK(parts.train.n() == 8);
    CHECK(parts.val.n() == 1);
    CHECK(parts.test.n() == 1);
}

TEST_CASE("split is deterministic and partitions the index range") {
    const auto a = split_indices(23, SplitSpec{0.7, 0.2, 0.1, 99});
    const auto b = split_indices(23, SplitSpec{0.7, 0.2, 0.1, 99});
    CHECK(a == b);

    std::set<std::size_t> all;
    std::size_t total = 0;
    for (const auto& part : a) {
        total += part.size();
        all.insert(part.begin(), part.end());
    }
    CHECK(total == 23);
    CHECK(all.size() == 23);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 22);
}

TEST_CASE("split rejects degenerate inputs") {
    const auto data = tiny_dataset(2, 2);
    CHECK_THROWS_AS(split(data, SplitSpec{0.8, 0.1, 0.1, 0}), DataError);
    const auto ok = tiny_dataset(10, 2);
    CHECK_THROWS_AS(split(ok, SplitSpec{0.5, 0.2, 0.2, 0}), ParseError);  // sums to 0.9
}

TEST_CASE("mask selects the only positive regardless of seed") {
    MultiLabelDataset data;
    data.features = Matrix(1, 1);
    data.labels = Matrix(1, 3);
    data.labels(0, 1) = 1.0;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 12345ULL}) {
        const auto masked = mask_single_positive(data, seed);
        CHECK(masked.data.observed[0] == 1);
    }
}

TEST_CASE("mask draws uniformly over the positive set") {
    MultiLabelDataset data;
    data.features = Matrix(1, 1);
    data.labels = Matrix(1, 4);
    data.labels(0, 0) = data.labels(0, 1) = data.labels(0, 3) = 1.0;

    std::map<std::size_t, int> counts;
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed)
        counts[mask_single_positive(data, seed).data.observed[0]]++;

    REQUIRE(counts.size() == 3);
    for (std::size_t label : {0u, 1u, 3u}) {
        const double freq = double(counts[label]) / trials;
        CHECK(std::fabs(freq - 1.0 / 3.0) <= 0.02);
    }
}

TEST_CASE("mask drops zero-positive rows and reports the count") {
    MultiLabelDataset data = tiny_dataset(4, 2);
    data.labels(2, 0) = 0.0;  // row 2 now has no positives
    const auto masked = mask_single_positive(data, 3);
    CHECK(masked.data.n() == 3);
    CHECK(masked.dropped == 1);

    MultiLabelDataset empty;
    empty.features = Matrix(2, 1);
    empty.labels = Matrix(2, 2);
    CHECK_THROWS_AS(mask_single_positive(empty, 0), DataError);
}

TEST_CASE("mask always picks a true positive") {
    const auto data = tiny_dataset(50, 5);
    const auto masked = mask_single_positive(data, 11);
    REQUIRE(masked.data.n() == 50);
    for (std::size_t i = 0; i < 50; ++i)
        CHECK(data.labels(i, masked.data.observed[i]) == 1.0);
}

TEST_CASE("positive_set returns the matching indices") {
    SinglePositiveDataset sp;
    sp.features = Matrix(4, 1);
    sp.observed = {0, 1, 0, 2};
    sp.num_classes = 4;
    CHECK(positive_set(sp, 0) == std::vector<std::size_t>{0, 2});
    CHECK(positive_set(sp, 3).empty());

    SinglePositiveDataset both;
    both.features = Matrix(2, 1);
    both.observed = {1, 1};
    both.num_classes = 2;
    CHECK(positive_set(both, 1) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("positive sets partition the masked dataset") {
    const auto data = tiny_dataset(37, 4);
    const auto masked = mask_single_positive(data, 5);
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        const auto set = positive_set(masked.data, j);
        total += set.size();
        seen.insert(set.begin(), set.end());
    }
    CHECK(total == masked.data.n());
    CHECK(seen.size() == masked.data.n());
}

TEST_CASE("single-positive file round-trips with 1-based gamma") {
    SinglePositiveDataset sp;
    sp.features = Matrix(2, 3);
    sp.features(0, 1) = 2.5;
    sp.features(1, 2) = -1.0;
    sp.observed = {2, 0};
    sp.num_classes = 3;
    std::ostringstream text;
    write_single_positive(sp, text);
    CHECK(text.str() == "3 2:2.5\n1 3:-1\n");
    std::istringstream in(text.str());
    const auto reparsed = parse_single_positive(in, 3, 3);
    CHECK(reparsed.observed == sp.observed);
    CHECK(reparsed.features == sp.features);
}
