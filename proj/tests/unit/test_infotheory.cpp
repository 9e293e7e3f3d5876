#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "featrec/error.hpp"
#include "featrec/infotheory.hpp"
#include "featrec/random.hpp"
#include "helpers.hpp"

using namespace featrec;
using namespace featrec::info;

namespace {

std::vector<int> random_codes(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<int> v(n);
    for (auto& x : v) x = static_cast<int>(rng.uniform_index(k));
    return v;
}

// Direct sum over the cells of a 2x2 table of counts.
double mi_by_hand(const int (&c)[2][2]) {
    const double n = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    double mi = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double pxy = c[i][j] / n;
            const double px = (c[i][0] + c[i][1]) / n;
            const double py = (c[0][j] + c[1][j]) / n;
            if (pxy > 0) mi += pxy * std::log2(pxy / (px * py));
        }
    }
    return mi;
}

}  // namespace

TEST_CASE("entropy examples") {
    CHECK(entropy(std::vector<int>{0, 1, 0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy(std::vector<int>{3, 3, 3}) == 0.0);
    CHECK(entropy(std::vector<int>{0, 1, 1, 1}) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
}

TEST_CASE("distribution masses sum to one") {
    const auto dist = DiscreteDistribution::from_codes(std::vector<int>{0, 2, 2, 5, 5, 5});
    double s = 0.0;
    for (double m : dist.mass) {
        CHECK(m >= 0.0);
        s += m;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
    CHECK(dist.mass[5] == 3.0 / 6.0);
}

TEST_CASE("mutual information examples") {
    const std::vector<int> fair{0, 1, 0, 1, 1, 0};
    CHECK(mutual_information(fair, fair) == doctest::Approx(1.0).epsilon(1e-12));

    // Product counts: every (x, y) cell once.
    const std::vector<int> x{0, 0, 1, 1};
    const std::vector<int> y{0, 1, 0, 1};
    CHECK(mutual_information(x, y) == 0.0);

    // Joint [[2,1],[1,2]] over six rows.
    const std::vector<int> a{0, 0, 0, 1, 1, 1};
    const std::vector<int> b{0, 0, 1, 0, 1, 1};
    const int table[2][2] = {{2, 1}, {1, 2}};
    const double by_hand = mi_by_hand(table);
    CHECK(std::abs(by_hand - 0.08170416594551039) <= 1e-12);
    CHECK(std::abs(mutual_information(a, b) - by_hand) <= 1e-12);
    CHECK(std::abs(mutual_information(a, b) - 0.0817) <= 1e-4);
}

TEST_CASE("length mismatch is a contract error") {
    CHECK_THROWS_AS(mutual_information(std::vector<int>{0, 1}, std::vector<int>{0}), ContractError);
    CHECK_THROWS_AS(joint_mutual_information(std::vector<int>{0, 1}, std::vector<int>{0, 1}, std::vector<int>{0}),
                    ContractError);
}

TEST_CASE("joint mutual information examples") {
    const std::vector<int> f{0, 0, 1, 1, 0, 1, 0, 1};
    const std::vector<int> s{0, 1, 0, 1, 1, 0, 0, 1};
    const std::vector<int> c{0, 1, 1, 0, 1, 1, 0, 0};  // f xor s
    const std::vector<int> constant(8, 0);
    CHECK(joint_mutual_information(f, constant, c) == doctest::Approx(mutual_information(f, c)).epsilon(1e-12));
    CHECK(joint_mutual_information(f, f, c) == doctest::Approx(mutual_information(f, c)).epsilon(1e-12));
    CHECK(mutual_information(f, c) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mutual_information(s, c) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(joint_mutual_information(f, s, c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized mutual information examples") {
    const std::vector<int> x{0, 1, 2, 0, 1};
    CHECK(normalized_mutual_information(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normalized_mutual_information(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) == 0.0);
    const std::vector<int> a{0, 0, 0, 1, 1, 1};
    const std::vector<int> b{0, 0, 1, 0, 1, 1};
    CHECK(std::abs(normalized_mutual_information(a, b) - 0.0817) <= 1e-4);
    CHECK(normalized_mutual_information(std::vector<int>{1, 1}, std::vector<int>{2, 2}) == 0.0);
}

TEST_CASE("chi-square statistic") {
    std::vector<int> x, y;
    auto fill = [&](int a, int b, int n) {
        for (int i = 0; i < n; ++i) {
            x.push_back(a);
            y.push_back(b);
        }
    };
    fill(0, 0, 10), fill(0, 1, 10), fill(1, 0, 10), fill(1, 1, 10);
    CHECK(ContingencyTable(x, y).chi_square() == doctest::Approx(0.0));
    x.clear(), y.clear();
    fill(0, 0, 20), fill(1, 1, 20);
    CHECK(ContingencyTable(x, y).chi_square() == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("randomized information identities") {
    Rng rng(2024);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 1 + rng.uniform_index(60);
        const auto x = random_codes(rng, n, 1 + rng.uniform_index(6));
        const auto y = random_codes(rng, n, 1 + rng.uniform_index(6));
        const double mxy = mutual_information(x, y);
        const double myx = mutual_information(y, x);
        REQUIRE(std::abs(mxy - myx) <= 1e-12);
        REQUIRE(mxy >= 0.0);
        REQUIRE(mxy <= std::min(entropy(x), entropy(y)) + 1e-9);
        const double nmi = normalized_mutual_information(x, y);
        REQUIRE(nmi >= 0.0);
        REQUIRE(nmi <= 1.0 + 1e-12);
        const auto c = random_codes(rng, n, 1 + rng.uniform_index(4));
        const double jmi = joint_mutual_information(x, y, c);
        REQUIRE(jmi >= std::max(mutual_information(x, c), mutual_information(y, c)) - 1e-9);
    }
}

TEST_CASE("independent product joints give zero") {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
        const std::size_t kx = 1 + rng.uniform_index(4);
        const std::size_t ky = 1 + rng.uniform_index(4);
        const std::size_t reps = 1 + rng.uniform_index(3);
        std::vector<int> x, y;
        for (std::size_t i = 0; i < kx; ++i) {
            for (std::size_t j = 0; j < ky; ++j) {
                for (std::size_t r = 0; r < reps; ++r) {
                    x.push_back(static_cast<int>(i));
                    y.push_back(static_cast<int>(j));
                }
            }
        }
        CHECK(mutual_information(x, y) <= 1e-12);
    }
}

TEST_CASE("merging codes with identical conditionals leaves MI unchanged") {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        // y codes 2 and 3 are drawn from the same conditional over x, in equal blocks.
        std::vector<int> x, y, merged;
        const std::size_t block = 2 + rng.uniform_index(5);
        const auto base = random_codes(rng, block, 3);
        const auto other = random_codes(rng, block, 3);
        for (int code : {0, 2, 3}) {
            const auto& src = code == 0 ? other : base;
            for (int v : src) {
                x.push_back(v);
                y.push_back(code);
                merged.push_back(code == 3 ? 2 : code);
            }
        }
        CHECK(std::abs(mutual_information(x, y) - mutual_information(x, merged)) <= 1e-9);
    }
}

TEST_CASE("mi_class_rank examples") {
    auto d = testutil::label_copy_dataset(4, 120, 6, 3, 3);
    const auto view = discretize(d, 8);
    const auto r = mi_class_rank(view, d.labels);
    CHECK(r.order.front() == 3);
    CHECK(is_permutation_of_range(r.order, 6));
    const auto pooled = mi_class_rank(view, d.labels, MiRankMode::pooled);
    CHECK(pooled.order.front() == 3);

    Matrix constant(10, 4, 1.0);
    std::vector<long long> y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const auto c = make_dataset(constant, y);
    const auto cr = mi_class_rank(discretize(c), c.labels);
    CHECK(cr.order == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("one-vs-rest score matches a brute-force sum") {
    Rng rng(19);
    const auto d = testutil::random_dataset(rng, 90, 5, 4);
    const auto view = discretize(d);
    const auto scores = mi_class_scores(view, d.labels);
    for (std::size_t j = 0; j < 5; ++j) {
        double expect = 0.0;
        for (int k = 0; k < d.class_count; ++k) {
            std::vector<int> indicator(d.size());
            double prior = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                indicator[i] = d.labels[i] == k ? 1 : 0;
                prior += indicator[i];
            }
            prior /= static_cast<double>(d.size());
            expect += prior * mutual_information(indicator, view.column(j));
        }
        CHECK(scores[j] == doctest::Approx(expect).epsilon(1e-12));
    }
}
