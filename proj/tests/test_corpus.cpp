#include <fstream>
#include <set>

#include "doctest.h"
#include "ssc/corpus.hpp"
#include "support.hpp"

using namespace ssc;
using namespace ssc::corpus;
using test_support::temp_path;

TEST_CASE("tokenize lowercases, isolates punctuation, splits on whitespace") {
    CHECK(tokenize("Good movie!") == std::vector<std::string>{"good", "movie", "!"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("A a  A") == std::vector<std::string>{"a", "a", "a"});
    CHECK(tokenize("don't stop") == std::vector<std::string>{"don", "'", "t", "stop"});
    CHECK(tokenize("  \t \n ").empty());
}

TEST_CASE("sentiment140 loader maps polarity and counts skips") {
    auto path = temp_path("s140_sample.csv");
    {
        std::ofstream out(path);
        out << "\"0\",\"1\",\"date\",\"NO_QUERY\",\"alice\",\"this is awful\"\n";
        out << "\"4\",\"2\",\"date\",\"NO_QUERY\",\"bob\",\"lovely, really lovely\"\n";
        out << "\"2\",\"3\",\"date\",\"NO_QUERY\",\"carol\",\"neutral tweet\"\n";
        out << "not a csv row\n";
        out << "\"4\",\"5\",\"date\",\"NO_QUERY\",\"dave\",\"quote \" inside, and commas\"\n";
        out << "\"0\",\"6\",\"date\",\"NO_QUERY\",\"eve\",\"...\"\n";
    }
    LoadStats st;
    auto docs = load_sentiment140(path, &st);
    REQUIRE(docs.size() == 4);
    CHECK(docs[0].label == 0);
    CHECK(docs[1].label == 1);
    CHECK(docs[1].tokens == std::vector<std::string>{"lovely", ",", "really", "lovely"});
    CHECK(docs[2].label == 1);  // embedded quote/comma row survives
    CHECK(st.total_rows == 6);
    CHECK(st.skipped_polarity == 1);
    CHECK(st.skipped_malformed == 1);
    CHECK(st.loaded + st.skipped() == st.total_rows);

    CHECK_THROWS_AS(load_sentiment140(temp_path("missing.csv")), InputError);
}

TEST_CASE("sentiment140 loader honors max_docs") {
    auto path = temp_path("s140_cap.csv");
    {
        std::ofstream out(path);
        for (int i = 0; i < 50; ++i)
            out << "\"4\",\"" << i << "\",\"d\",\"q\",\"u\",\"text " << i << "\"\n";
    }
    CHECK(load_sentiment140(path, nullptr, 10).size() == 10);
}

TEST_CASE("uci sentences loader") {
    auto path = temp_path("uci_sample.txt");
    {
        std::ofstream out(path);
        out << "great phone.\t1\n";
        out << "waste of money\t0\n";
        out << "no label here\n";
        out << "trailing space ok\t1 \n";
    }
    LoadStats st;
    auto docs = load_uci_sentences(path, &st);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].label == 1);
    CHECK(docs[0].tokens == std::vector<std::string>{"great", "phone", "."});
    CHECK(docs[1].label == 0);
    CHECK(st.skipped_malformed == 1);
    CHECK(st.loaded + st.skipped() == st.total_rows);
}

TEST_CASE("movie review loader reads pos/ and neg/ trees") {
    auto root = temp_path("movies");
    std::filesystem::create_directories(root + "/pos");
    std::filesystem::create_directories(root + "/neg");
    for (int i = 0; i < 3; ++i) {
        std::ofstream(root + "/pos/cv" + std::to_string(i) + ".txt")
            << "a fine film . sentence two here .";
        std::ofstream(root + "/neg/cv" + std::to_string(i) + ".txt") << "terrible stuff";
    }
    LoadStats st;
    auto docs = load_movie_reviews(root, &st);
    REQUIRE(docs.size() == 6);
    int pos = 0;
    for (const auto& d : docs) pos += *d.label;
    CHECK(pos == 3);
    // multi-sentence review stays one document
    CHECK(docs[3].tokens.size() == 8);
    CHECK_THROWS_AS(load_movie_reviews(temp_path("movies_missing")), InputError);
}

namespace {

std::vector<Document> make_docs(int n) {
    std::vector<Document> docs;
    for (int i = 0; i < n; ++i)
        docs.push_back({"d" + std::to_string(i), {"tok"}, i % 2});
    return docs;
}

std::set<std::string> ids_of(const std::vector<Document>& docs) {
    std::set<std::string> s;
    for (const auto& d : docs) s.insert(d.id);
    return s;
}

}  // namespace

TEST_CASE("three-way split sizes and determinism") {
    auto s9 = split_three_way(make_docs(9), 7);
    CHECK(s9.train.size() == 3);
    CHECK(s9.dev.size() == 3);
    CHECK(s9.test.size() == 3);

    auto s10 = split_three_way(make_docs(10), 7);
    CHECK(s10.train.size() == 4);
    CHECK(s10.dev.size() == 3);
    CHECK(s10.test.size() == 3);

    auto again = split_three_way(make_docs(10), 7);
    CHECK(ids_of(again.train) == ids_of(s10.train));
    CHECK(ids_of(again.test) == ids_of(s10.test));

    CHECK_THROWS_AS(split_three_way(make_docs(2), 1), InputError);
}

TEST_CASE("three-way split is a disjoint exhaustive partition") {
    for (int n : {3, 17, 100}) {
        for (uint64_t seed : {1ull, 2ull, 99ull}) {
            auto docs = make_docs(n);
            auto s = split_three_way(docs, seed);
            auto all = ids_of(s.train);
            for (const auto& d : s.dev) CHECK(all.insert(d.id).second);
            for (const auto& d : s.test) CHECK(all.insert(d.id).second);
            CHECK(all == ids_of(docs));
        }
    }
}

TEST_CASE("mask_labels floor rule, erasure, and nesting") {
    auto docs = make_docs(1000);
    auto [labeled, pool] = mask_labels(docs, 0.01, 42);
    CHECK(labeled.size() == 10);
    CHECK(pool.size() == 990);
    for (const auto& d : labeled) CHECK(d.label.has_value());
    for (const auto& d : pool) CHECK(!d.label.has_value());

    auto [all_labeled, empty_pool] = mask_labels(docs, 1.0, 42);
    CHECK(all_labeled.size() == 1000);
    CHECK(empty_pool.empty());

    // tiny fractions still yield one labeled example
    CHECK(mask_labels(docs, 1e-9, 42).first.size() == 1);

    // nesting under a fixed seed
    auto small = ids_of(mask_labels(docs, 0.01, 7).first);
    auto large = ids_of(mask_labels(docs, 0.1, 7).first);
    for (const auto& id : small) CHECK(large.count(id) == 1);

    CHECK_THROWS_AS(mask_labels(docs, 0.0, 1), InputError);
    CHECK_THROWS_AS(mask_labels(docs, 1.5, 1), InputError);
}

TEST_CASE("two moons generator") {
    auto pts = make_two_moons(100, 0.0, 3);
    REQUIRE(pts.size() == 100);
    int per_class[2] = {0, 0};
    for (const auto& p : pts) ++per_class[p.label];
    CHECK(per_class[0] == 50);
    CHECK(per_class[1] == 50);

    // angle 0 on moon 0 is the first point
    CHECK(pts[0].x[0] == doctest::Approx(1.0));
    CHECK(pts[0].x[1] == doctest::Approx(0.0));
    CHECK(pts[0].label == 0);

    auto again = make_two_moons(100, 0.0, 3);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].x == again[i].x);
        CHECK(pts[i].label == again[i].label);
    }
    auto noisy = make_two_moons(100, 0.1, 3);
    auto noisy2 = make_two_moons(100, 0.1, 3);
    for (size_t i = 0; i < noisy.size(); ++i) CHECK(noisy[i].x == noisy2[i].x);

    CHECK_THROWS_AS(make_two_moons(0, 0.1, 1), InputError);
    CHECK_THROWS_AS(make_two_moons(7, 0.1, 1), InputError);
    CHECK_THROWS_AS(make_two_moons(10, -0.1, 1), InputError);
}
