#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "imbgan/core.hpp"
#include "imbgan/fixtures.hpp"

using namespace imbgan;

namespace {

Dataset parse(const std::string& text, LabelColumn col = std::string("label"), const std::string& minority = "1") {
    std::istringstream in(text);
    return read_csv(in, col, minority);
}

Dataset toy(Index majority, Index minority, Index d, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.features.resize(majority + minority, d);
    ds.labels.resize(majority + minority);
    for (Index i = 0; i < ds.features.size(); ++i) ds.features.data()[i] = rng.normal();
    for (Index i = 0; i < majority + minority; ++i) ds.labels(i) = i < majority ? 0 : 1;
    ds.feature_names = default_feature_names(d);
    return ds;
}

}  // namespace

TEST_CASE("rng streams are pinned to the seed") {
    Rng a(123), b(123), c(124);
    std::vector<double> xa, xb, xc;
    for (int i = 0; i < 100; ++i) {
        xa.push_back(a.uniform01());
        xb.push_back(b.uniform01());
        xc.push_back(c.uniform01());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);
    // mt19937_64's 10000th output is fixed by the C++ standard.
    Rng d(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = d.next_u64();
    CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("rng child streams depend only on the seed") {
    Rng a(9);
    Rng before = a.child(3);
    for (int i = 0; i < 50; ++i) a.normal();
    Rng after = a.child(3);
    CHECK(before.next_u64() == after.next_u64());
    CHECK(Rng(9).child(3).next_u64() != Rng(9).child(4).next_u64());
}

TEST_CASE("uniform_index stays in range and covers it") {
    Rng rng(1);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto k = rng.uniform_index(7);
        REQUIRE(k < 7);
        ++hits[k];
    }
    for (int h : hits) CHECK(h > 800);
}

TEST_CASE("normal draws have unit moments") {
    Rng rng(11);
    double s = 0, s2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.03);
    CHECK(std::abs(s2 / n - 1.0) < 0.05);
}

TEST_CASE("load_csv: symmetric toy file") {
    const auto ds = parse("a,b,label\n1,2,0\n3,4,1\n5,6,0\n7,8,1\n");
    CHECK(ds.n_samples() == 4);
    CHECK(ds.n_features() == 2);
    CHECK(ds.count(0) == 2);
    CHECK(ds.count(1) == 2);
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.features(2, 1) == 6.0);
    CHECK(ds.labels(1) == 1);
}

TEST_CASE("load_csv: ragged row reports its line") {
    try {
        parse("1,2,0\n1,2,3,1\n1,2,0\n1,2,1\n", std::size_t{2});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("load_csv: error kinds") {
    CHECK_THROWS_AS(parse("a,b,label\n1,x,0\n3,4,1\n5,6,0\n7,8,1\n"), ParseError);
    CHECK_THROWS_AS(parse("a,b,label\n1,nan,0\n3,4,1\n5,6,0\n7,8,1\n"), ParseError);
    CHECK_THROWS_AS(parse("a,b,c\n1,2,0\n3,4,1\n5,6,0\n7,8,1\n"), ConfigError);
    CHECK_THROWS_AS(parse("a,b,label\n1,2,0\n3,4,1\n5,6,0\n"), DegenerateDataError);
    CHECK_THROWS_AS(parse("a,b,label\n1,2,0\n3,4,0\n5,6,0\n"), DegenerateDataError);
    CHECK_THROWS_AS(parse("1,2,0\n3,4,1\n", std::size_t{7}), ConfigError);
}

TEST_CASE("load_csv: string labels collapse one-vs-rest, positional column") {
    const auto ds = parse("M,0.1,0.2\nF,0.3,0.4\nI,0.5,0.6\nM,0.7,0.8\nF,0.9,1.0\nI,1.1,1.2\n", std::size_t{0}, "F");
    CHECK(ds.n_features() == 2);
    CHECK(ds.count(1) == 2);
    CHECK(ds.count(0) == 4);
    CHECK(ds.labels(1) == 1);
    CHECK(ds.features(0, 0) == 0.1);
}

TEST_CASE("load_csv: numeric label match ignores formatting") {
    const auto ds = parse("x,y\n1,1.0\n2,0\n3,1\n4,0\n5,0\n", std::string("y"), "1");
    CHECK(ds.count(1) == 2);
}

TEST_CASE("csv round trip is lossless") {
    Dataset ds = toy(7, 3, 4, 5);
    ds.features(0, 0) = 0.1;
    ds.features(1, 1) = 1e-300;
    ds.features(2, 2) = -123456.789012345678;
    std::ostringstream out;
    write_csv(out, ds);
    const auto back = parse(out.str());
    CHECK(back == ds);
}

TEST_CASE("file round trip through load_csv") {
    const auto path = std::filesystem::temp_directory_path() / "imbgan_core_roundtrip.csv";
    const Dataset ds = toy(12, 4, 3, 2);
    write_csv(path.string(), ds);
    CHECK(load_csv(path.string(), std::string("label"), "1") == ds);
    std::filesystem::remove(path);
}

TEST_CASE("minmax examples") {
    Matrix col(3, 1);
    col << 0, 5, 10;
    const auto p = minmax_fit(col);
    const Matrix s = minmax_apply(col, p);
    CHECK(s(0, 0) == 0.0);
    CHECK(s(1, 0) == 0.5);
    CHECK(s(2, 0) == 1.0);

    Matrix c(3, 1);
    c << 7, 7, 7;
    const Matrix sc = minmax_apply(c, minmax_fit(c));
    for (Index i = 0; i < 3; ++i) CHECK(sc(i, 0) == 0.5);
    CHECK(minmax_invert(sc, minmax_fit(c))(1, 0) == 7.0);

    const Matrix ranged = minmax_apply(col, p, Range{-1.0, 1.0});
    CHECK(ranged(0, 0) == -1.0);
    CHECK(ranged(1, 0) == doctest::Approx(0.0));
    CHECK(ranged(2, 0) == 1.0);
}

TEST_CASE("minmax round trip against a direct affine inverse") {
    Rng rng(3);
    Matrix x(5, 3);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-50, 50);
    const auto p = minmax_fit(x);
    const Matrix s = minmax_apply(x, p, Range{0.0, 1.0}, false);
    for (Index j = 0; j < 3; ++j)
        for (Index i = 0; i < 5; ++i) {
            const double oracle = p.per_feature_min(j) + s(i, j) * (p.per_feature_max(j) - p.per_feature_min(j));
            CHECK(std::abs(oracle - x(i, j)) < 1e-9);
        }
    CHECK((minmax_invert(s, p) - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("minmax clips held-out values and is order preserving") {
    Matrix train(2, 1);
    train << 0, 10;
    const auto p = minmax_fit(train);
    Matrix held(3, 1);
    held << -5, 4, 20;
    const Matrix clipped = minmax_apply(held, p);
    CHECK(clipped(0, 0) == 0.0);
    CHECK(clipped(2, 0) == 1.0);
    const Matrix raw = minmax_apply(held, p, Range{}, false);
    CHECK(raw(0, 0) == doctest::Approx(-0.5));
    CHECK(raw(2, 0) == doctest::Approx(2.0));

    Rng rng(8);
    Matrix x(200, 2);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal() * 30;
    const auto px = minmax_fit(x);
    const Matrix sx = minmax_apply(x, px);
    for (Index j = 0; j < 2; ++j)
        for (Index a = 0; a < 200; ++a)
            for (Index b = 0; b < 200; ++b)
                if (x(a, j) <= x(b, j)) REQUIRE(sx(a, j) <= sx(b, j));
    CHECK(sx.minCoeff() >= 0.0);
    CHECK(sx.maxCoeff() <= 1.0);
}

TEST_CASE("minmax rejects non-finite input") {
    Matrix x(2, 1);
    x << 1, std::numeric_limits<double>::infinity();
    CHECK_THROWS(minmax_fit(x));
}

TEST_CASE("stratified split: 90/10 at 0.8") {
    const Dataset ds = toy(90, 10, 2, 1);
    const auto s = train_test_split(ds, {0.8, 17, true});
    CHECK(s.train.count(0) == 72);
    CHECK(s.train.count(1) == 8);
    CHECK(s.test.count(0) == 18);
    CHECK(s.test.count(1) == 2);
}

TEST_CASE("stratified split: abalone shape under the pinned rounding rule") {
    CHECK(stratified_train_count(3337, 0.8) == 2670);  // 2669.6 rounds up
    CHECK(stratified_train_count(840, 0.8) == 672);
    const auto shape = *find_shape("abalone");
    const auto ds = make_shape_fixture(shape, 1);
    const auto s = train_test_split(ds, {0.8, 3, true});
    CHECK(s.train.n_samples() == 3342);
    CHECK(s.test.n_samples() == 835);
}

TEST_CASE("stratified_train_count rounds half away from zero and keeps both sides") {
    CHECK(stratified_train_count(5, 0.5) == 3);
    CHECK(stratified_train_count(2, 0.99) == 1);
    CHECK(stratified_train_count(2, 0.01) == 1);
    for (Index n = 2; n < 60; ++n)
        for (double f : {0.1, 0.25, 0.5, 0.7, 0.8, 0.9}) {
            const Index t = stratified_train_count(n, f);
            const double exact = f * static_cast<double>(n);
            CHECK(t >= 1);
            CHECK(t <= n - 1);
            if (exact >= 1.0 && exact <= static_cast<double>(n - 1)) {
                CHECK(t >= static_cast<Index>(std::floor(exact)));
                CHECK(t <= static_cast<Index>(std::ceil(exact)));
            }
        }
}

TEST_CASE("split determinism and partition property over many seeds") {
    const Dataset ds = toy(61, 13, 3, 4);
    std::set<std::vector<Index>> distinct;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto a = train_test_split(ds, {0.75, seed, true});
        const auto b = train_test_split(ds, {0.75, seed, true});
        CHECK(a.train_rows == b.train_rows);
        std::vector<Index> all = a.train_rows;
        all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
        std::sort(all.begin(), all.end());
        REQUIRE(all.size() == 74);
        for (Index i = 0; i < 74; ++i) REQUIRE(all[static_cast<std::size_t>(i)] == i);
        CHECK(std::is_sorted(a.train_rows.begin(), a.train_rows.end()));
        CHECK(a.train.count(1) == stratified_train_count(13, 0.75));
        CHECK(a.train.count(0) == stratified_train_count(61, 0.75));
        for (std::size_t r = 0; r < a.train_rows.size(); ++r)
            REQUIRE(a.train.features.row(static_cast<Index>(r)) == ds.features.row(a.train_rows[r]));
        distinct.insert(a.train_rows);
    }
    CHECK(distinct.size() == 40);
}

TEST_CASE("unstratified split keeps the overall fraction") {
    const Dataset ds = toy(80, 20, 2, 6);
    const auto s = train_test_split(ds, {0.8, 1, false});
    CHECK(s.train.n_samples() == 80);
    CHECK(s.test.n_samples() == 20);
}

TEST_CASE("split needs two rows per class") {
    Dataset ds = toy(10, 2, 2, 1);
    ds.labels(11) = 0;
    CHECK_THROWS_AS(train_test_split(ds, {}), DegenerateDataError);
}

TEST_CASE("class_partition examples") {
    Dataset ds;
    ds.features = Matrix::Zero(5, 1);
    ds.labels.resize(5);
    ds.labels << 0, 1, 0, 1, 0;
    auto p = class_partition(ds);
    CHECK(p.minority == std::vector<Index>{1, 3});
    CHECK(p.majority == std::vector<Index>{0, 2, 4});
    ds.labels.setZero();
    p = class_partition(ds);
    CHECK(p.minority.empty());
    CHECK(p.majority.size() == 5);
    CHECK_THROWS_AS(require_two_classes(ds), DegenerateDataError);

    const auto abalone = make_shape_fixture(*find_shape("abalone"), 2);
    CHECK(class_partition(abalone).minority.size() == 840);
}

TEST_CASE("dataset validate, select, concat") {
    Dataset ds = toy(3, 2, 2, 1);
    CHECK_NOTHROW(ds.validate());
    const std::vector<Index> rows{4, 0};
    const auto sel = ds.select(rows);
    CHECK(sel.n_samples() == 2);
    CHECK(sel.labels(0) == 1);
    CHECK(sel.features.row(1) == ds.features.row(0));
    const auto joined = ds.concat(sel);
    CHECK(joined.n_samples() == 7);
    CHECK(joined.features.row(5) == ds.features.row(4));
    Dataset bad = ds;
    bad.labels(0) = 2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = ds;
    bad.features(0, 0) = std::nan("");
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("fixtures reproduce the benchmark class counts") {
    CHECK(benchmark_shapes().size() == 8);
    for (const auto& s : benchmark_shapes()) {
        if (s.name == "shuttle") continue;  // large; covered by the acceptance suite
        const auto ds = make_shape_fixture(s, 3);
        CHECK(ds.count(1) == s.minority);
        CHECK(ds.count(0) == s.majority);
        CHECK(ds.n_features() == s.n_features);
    }
    CHECK(make_shape_fixture(*find_shape("blobs500"), 7) == make_shape_fixture(*find_shape("blobs500"), 7));
    CHECK_FALSE(find_shape("nope"));
}
