#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ssc/embedding.hpp"
#include "support.hpp"

using namespace ssc;
using namespace ssc::embedding;
using test_support::temp_path;

namespace {

corpus::Document doc(std::string id, std::vector<std::string> toks) {
    return {std::move(id), std::move(toks), std::nullopt};
}

double cosine(const Vec& a, const Vec& b) {
    double d = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        d += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return d / std::sqrt(na * nb + 1e-30);
}

// Toy corpus: two word families, documents drawn mostly from one family.
std::vector<corpus::Document> toy_corpus(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<corpus::Document> docs;
    for (int i = 0; i < n; ++i) {
        std::string fam = (i % 2 == 0) ? "a" : "b";
        std::vector<std::string> toks;
        for (int j = 0; j < 12; ++j)
            toks.push_back(fam + std::to_string(rng() % 8));
        docs.push_back(doc("doc" + std::to_string(i), std::move(toks)));
    }
    return docs;
}

EmbeddingConfig toy_config() {
    EmbeddingConfig c;
    c.dim = 16;
    c.epochs = 100;
    c.min_count = 1;
    c.subsample_threshold = 0;  // tiny corpus, keep every token
    c.seed = 5;
    return c;
}

}  // namespace

TEST_CASE("build_vocab thresholds and orders deterministically") {
    std::vector<corpus::Document> docs = {doc("1", {"a", "a", "b"})};
    auto v = build_vocab(docs, 2);
    CHECK(v.size() == 1);
    CHECK(v.tokens[0] == "a");
    CHECK(v.lookup("b") == -1);

    auto v1 = build_vocab(docs, 1);
    CHECK(v1.size() == 2);
    CHECK(v1.tokens == std::vector<std::string>{"a", "b"});  // freq desc, then token asc

    docs.push_back(doc("2", {"c", "c", "b"}));
    auto v2 = build_vocab(docs, 1);
    auto v3 = build_vocab(docs, 1);
    CHECK(v2.tokens == v3.tokens);
    // a and c tie at 2, alphabetical order breaks it
    CHECK(v2.tokens == std::vector<std::string>{"a", "c", "b"});

    CHECK_THROWS_AS(build_vocab(docs, 100), InputError);
    CHECK_THROWS_AS(build_vocab({}, 1), InputError);
}

TEST_CASE("negative sampling gradient matches finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    const int dim = 7;
    Matrix words(4, dim);
    for (auto& w : words.a) w = u(rng);
    Vec dv(dim);
    for (auto& x : dv) x = u(rng);
    const int target = 1;
    const std::vector<int> negatives = {0, 3};

    // independent logistic-loss oracle
    auto loss_at = [&](const Vec& d, const Matrix& w) {
        auto term = [&](int o, double label) {
            double s = 0;
            for (int j = 0; j < dim; ++j) s += d[j] * w(o, j);
            double p = 1.0 / (1.0 + std::exp(-s));
            return label > 0.5 ? -std::log(p) : -std::log(1.0 - p);
        };
        return term(target, 1.0) + term(negatives[0], 0.0) + term(negatives[1], 0.0);
    };

    const double lr = 1e-3, h = 1e-6;
    Vec dv2 = dv;
    Matrix words2 = words;
    double reported = negative_sampling_step(dv2.data(), words2, dim, target, negatives, lr,
                                             /*update_words=*/true);
    CHECK(reported == doctest::Approx(loss_at(dv, words)).epsilon(1e-10));

    // recover the analytic gradient from the SGD update and compare
    for (int j = 0; j < dim; ++j) {
        double analytic = (dv[j] - dv2[j]) / lr;
        Vec dp = dv, dm = dv;
        dp[j] += h;
        dm[j] -= h;
        double fd = (loss_at(dp, words) - loss_at(dm, words)) / (2 * h);
        CHECK(analytic == doctest::Approx(fd).epsilon(1e-4));
    }
    for (int o : {target, negatives[0], negatives[1]}) {
        for (int j = 0; j < dim; ++j) {
            double analytic = (words(o, j) - words2(o, j)) / lr;
            Matrix wp = words, wm = words;
            wp(o, j) += h;
            wm(o, j) -= h;
            double fd = (loss_at(dv, wp) - loss_at(dv, wm)) / (2 * h);
            CHECK(analytic == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("pvdbow training is deterministic and shape-correct") {
    auto docs = toy_corpus(50, 3);
    auto cfg = toy_config();
    auto m1 = train_pvdbow(docs, cfg);
    auto m2 = train_pvdbow(docs, cfg);
    CHECK(m1.doc_vectors.rows == 50);
    CHECK(m1.doc_vectors.cols == 16);
    CHECK(m1.doc_vectors.a == m2.doc_vectors.a);
    CHECK(m1.word_vectors.a == m2.word_vectors.a);
    CHECK(m1.epoch_loss == m2.epoch_loss);
    for (double v : m1.doc_vectors.a) CHECK(std::isfinite(v));
}

TEST_CASE("identical documents embed closer than random pairs") {
    auto docs = toy_corpus(50, 3);
    docs[10].tokens = docs[20].tokens;  // a twin pair
    auto m = train_pvdbow(docs, toy_config());

    double twin = cosine(m.doc_vector(10), m.doc_vector(20));
    std::vector<double> randoms;
    for (int i = 0; i < 50; ++i)
        for (int j = i + 1; j < 50; ++j)
            if (!(i == 10 && j == 20)) randoms.push_back(cosine(m.doc_vector(i), m.doc_vector(j)));
    std::nth_element(randoms.begin(), randoms.begin() + randoms.size() / 2, randoms.end());
    CHECK(twin > randoms[randoms.size() / 2]);
}

TEST_CASE("epoch loss is non-increasing over the final half of epochs") {
    auto m = train_pvdbow(toy_corpus(50, 3), toy_config());
    const auto& loss = m.epoch_loss;
    REQUIRE(loss.size() == 100);
    for (size_t e = loss.size() / 2; e + 1 < loss.size(); ++e)
        CHECK(loss[e + 1] <= loss[e] * 1.05);
}

TEST_CASE("infer_docvec fallback, determinism, and fidelity") {
    auto docs = toy_corpus(50, 3);
    auto m = train_pvdbow(docs, toy_config());

    auto oov = infer_docvec(m, {"zzz", "qqq"}, 20, 1);
    CHECK(oov.all_oov);
    CHECK(oov.vector == Vec(16, 0.0));

    auto r1 = infer_docvec(m, docs[7].tokens, 20, 9);
    auto r2 = infer_docvec(m, docs[7].tokens, 20, 9);
    CHECK(!r1.all_oov);
    CHECK(r1.vector == r2.vector);

    CHECK(cosine(r1.vector, m.doc_vector(7)) > 0.5);
    CHECK_THROWS_AS(infer_docvec(m, docs[7].tokens, 0, 9), InputError);
}

TEST_CASE("vector file round trip") {
    Matrix v(3, 4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (auto& x : v.a) x = u(rng);
    std::vector<std::string> ids = {"a", "b", "c"};

    auto path = temp_path("vectors.txt");
    save_vectors(ids, v, path);
    auto [ids2, v2] = load_vectors(path);
    CHECK(ids2 == ids);
    REQUIRE(v2.rows == 3);
    REQUIRE(v2.cols == 4);

    // stability: a second round trip is the identity, byte for byte
    auto path2 = temp_path("vectors2.txt");
    save_vectors(ids2, v2, path2);
    auto [ids3, v3] = load_vectors(path2);
    CHECK(v3.a == v2.a);
    CHECK(test_support::read_file(path) == test_support::read_file(path2));

    // empty set is a valid file
    auto empty_path = temp_path("vectors_empty.txt");
    save_vectors({}, Matrix(0, 4), empty_path);
    auto [eids, ev] = load_vectors(empty_path);
    CHECK(eids.empty());
    CHECK(ev.rows == 0);

    // header/row mismatch
    auto bad = temp_path("vectors_bad.txt");
    std::ofstream(bad) << "DOCVEC v1 3 4\na 1 2 3 4\n";
    CHECK_THROWS_AS(load_vectors(bad), InputError);
    std::ofstream(bad) << "DOCVEC v1 1 4\na 1 2 3 4\nb 5 6 7 8\n";
    CHECK_THROWS_AS(load_vectors(bad), InputError);
}

TEST_CASE("model file round trip preserves inference") {
    auto docs = toy_corpus(20, 4);
    auto cfg = toy_config();
    cfg.epochs = 30;
    auto m = train_pvdbow(docs, cfg);
    auto path = temp_path("model.txt");
    save_model(m, path);
    auto m2 = load_model(path);

    CHECK(m2.vocab.tokens == m.vocab.tokens);
    CHECK(m2.doc_ids == m.doc_ids);
    auto a = infer_docvec(m, docs[3].tokens, 10, 5);
    auto b = infer_docvec(m2, docs[3].tokens, 10, 5);
    REQUIRE(a.vector.size() == b.vector.size());
    for (size_t i = 0; i < a.vector.size(); ++i)
        CHECK(a.vector[i] == doctest::Approx(b.vector[i]).epsilon(1e-6));

    // second round trip is exact
    auto path2 = temp_path("model2.txt");
    save_model(m2, path2);
    auto m3 = load_model(path2);
    CHECK(m3.word_vectors.a == m2.word_vectors.a);
    CHECK(m3.doc_vectors.a == m2.doc_vectors.a);
}
