#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"

#include "csq/classifier.hpp"
#include "csq/dataset.hpp"

using namespace csq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("csq_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("load_dataset parses a small file") {
    TempDir tmp;
    write_file(tmp.path / "d.csv", "f0,f1,label\n1.5,2.0,0\n-3.25,0.5,1\n0.0,1.0,0\n");
    write_file(tmp.path / "d.meta.json", "{\"n\": 3, \"d\": 2, \"L\": 2}");
    const Dataset data = load_dataset((tmp.path / "d.csv").string());
    CHECK(data.size() == 3);
    CHECK(data.dim() == 2);
    CHECK(data.num_classes() == 2);
    CHECK(data.label(0) == 0);
    CHECK(data.label(1) == 1);
    CHECK(data.row(1)[0] == -3.25);
}

TEST_CASE("load_dataset rejects bad rows with their row number") {
    TempDir tmp;
    write_file(tmp.path / "d.meta.json", "{\"n\": 2, \"d\": 1, \"L\": 4}");

    SUBCASE("label out of range") {
        write_file(tmp.path / "d.csv", "f0,label\n1.0,0\n2.0,5\n");
        CHECK_THROWS_WITH(load_dataset((tmp.path / "d.csv").string()),
                          "label out of range at row 2");
    }
    SUBCASE("non-integer label") {
        write_file(tmp.path / "d.csv", "f0,label\n1.0,0\n2.0,zebra\n");
        CHECK_THROWS_WITH(load_dataset((tmp.path / "d.csv").string()),
                          "non-integer label at row 2");
    }
    SUBCASE("inconsistent columns") {
        write_file(tmp.path / "d.csv", "f0,label\n1.0,0\n2.0,3.0,1\n");
        CHECK_THROWS_WITH(load_dataset((tmp.path / "d.csv").string()),
                          "inconsistent column count at row 2");
    }
    SUBCASE("malformed feature") {
        write_file(tmp.path / "d.csv", "f0,label\nx,0\n2.0,1\n");
        CHECK_THROWS_WITH(load_dataset((tmp.path / "d.csv").string()),
                          "malformed value at row 1");
    }
    SUBCASE("empty data section") {
        write_file(tmp.path / "d.csv", "f0,label\n");
        CHECK_THROWS_WITH(load_dataset((tmp.path / "d.csv").string()), "empty dataset");
    }
}

TEST_CASE("save then load round-trips every double exactly") {
    TempDir tmp;
    const Dataset blobs = synth_blobs(7, 3, 4, 1.37, RngSeed{99});
    const auto p1 = (tmp.path / "a.csv").string();
    const auto p2 = (tmp.path / "b.csv").string();
    save_dataset(blobs, p1);
    const Dataset once = load_dataset(p1);
    save_dataset(once, p2);
    const Dataset twice = load_dataset(p2);

    REQUIRE(once.size() == blobs.size());
    REQUIRE(twice.size() == blobs.size());
    for (int i = 0; i < blobs.size(); ++i) {
        CHECK(once.label(i) == blobs.label(i));
        for (int j = 0; j < blobs.dim(); ++j) {
            CHECK(once.row(i)[static_cast<std::size_t>(j)] == blobs.row(i)[static_cast<std::size_t>(j)]);
            CHECK(twice.row(i)[static_cast<std::size_t>(j)] == once.row(i)[static_cast<std::size_t>(j)]);
        }
    }
}

TEST_CASE("split_indices cardinalities, disjointness and determinism") {
    const IndexSplit s = split_indices(10, 2, 3, RngSeed{1});
    CHECK(s.initial_labeled.size() == 2);
    CHECK(s.validation.size() == 3);
    CHECK(s.pool.size() == 5);

    std::set<int> all;
    for (int i : s.initial_labeled) all.insert(i);
    for (int i : s.validation) all.insert(i);
    for (int i : s.pool) all.insert(i);
    CHECK(all.size() == 10);

    const IndexSplit again = split_indices(10, 2, 3, RngSeed{1});
    CHECK(again.initial_labeled == s.initial_labeled);
    CHECK(again.validation == s.validation);
    CHECK(again.pool == s.pool);

    const IndexSplit empty = split_indices(6, 0, 0, RngSeed{4});
    CHECK(empty.pool.size() == 6);
    CHECK_THROWS(split_indices(5, 3, 3, RngSeed{0}));
}

TEST_CASE("split_indices property sweep") {
    RngStream rng(RngSeed{321}, "split-prop");
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(rng.uniform_below(200));
        const int init = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n) + 1));
        const int val = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - init) + 1));
        const RngSeed seed{rng.next_u64()};
        const IndexSplit a = split_indices(n, init, val, seed);
        const IndexSplit b = split_indices(n, init, val, seed);
        REQUIRE(a.initial_labeled == b.initial_labeled);
        REQUIRE(a.validation == b.validation);
        REQUIRE(a.pool == b.pool);
        std::set<int> all;
        for (int i : a.initial_labeled) all.insert(i);
        for (int i : a.validation) all.insert(i);
        for (int i : a.pool) all.insert(i);
        REQUIRE(static_cast<int>(all.size()) == n);
        REQUIRE(*all.begin() >= 0);
        REQUIRE(*all.rbegin() < n);
    }
}

TEST_CASE("synth_blobs shape, determinism and degenerate spread") {
    const Dataset d = synth_blobs(10, 3, 2, 1.0, RngSeed{5});
    CHECK(d.size() == 30);
    int hist[3] = {};
    for (int i = 0; i < d.size(); ++i) ++hist[d.label(i)];
    CHECK(hist[0] == 10);
    CHECK(hist[1] == 10);
    CHECK(hist[2] == 10);

    const Dataset e = synth_blobs(10, 3, 2, 1.0, RngSeed{5});
    for (int i = 0; i < d.size(); ++i)
        for (int j = 0; j < d.dim(); ++j)
            CHECK(d.row(i)[static_cast<std::size_t>(j)] == e.row(i)[static_cast<std::size_t>(j)]);

    const Dataset flat = synth_blobs(4, 2, 3, 0.0, RngSeed{5});
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(flat.row(i)[static_cast<std::size_t>(j)] == flat.row(0)[static_cast<std::size_t>(j)]);
}

TEST_CASE("tight blobs are linearly separable for the softmax model") {
    const Dataset d = synth_blobs(50, 4, 3, 0.8, RngSeed{12});
    std::vector<int> ids(static_cast<std::size_t>(d.size()));
    for (int i = 0; i < d.size(); ++i) ids[static_cast<std::size_t>(i)] = i;
    TrainConfig cfg;
    cfg.epochs = 80;
    cfg.seed = RngSeed{1};
    const SoftmaxModel model = train(d, ids, d.labels(), cfg);
    CHECK(accuracy(model, d, ids) >= 0.99);
}
