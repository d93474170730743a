#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ftn/errors.hpp"
#include "ftn/nn/checkpoint.hpp"
#include "ftn/nn/gradcheck.hpp"
#include "ftn/nn/model.hpp"

using namespace ftn;
using namespace ftn::nn;

namespace {
Mat random_input(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Rng rng(seed);
    Mat x(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = rng.gaussian();
    }
    return x;
}

std::vector<std::uint8_t> random_labels(std::size_t n, int classes, std::uint64_t seed) {
    Rng rng(seed, 1);
    std::vector<std::uint8_t> y(n);
    for (auto& v : y) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(classes)));
    return y;
}
}  // namespace

TEST_CASE("dense basics: sigma(0)=0.5, identity passthrough, shape errors") {
    Rng rng(1);
    DenseLayer d;
    d.init(3, 4, Activation::sigmoid, rng);
    d.w.setZero();
    d.b.setZero();
    const Mat x = random_input(4, 5, 2);
    const Mat y = d.forward(x);
    CHECK((y.array() - 0.5).abs().maxCoeff() == 0.0);

    DenseLayer id;
    id.init(4, 4, Activation::linear, rng);
    id.w = Mat::Identity(4, 4);
    id.b.setZero();
    CHECK((id.forward(x) - x).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(d.forward(random_input(5, 2, 3)), ContractError);
}

TEST_CASE("lstm cell equations at zero weights") {
    Rng rng(4);
    RecurrentLayer cell;
    cell.init(CellKind::lstm, 1, 3, true, rng);
    cell.wx.setZero();
    cell.wh.setZero();
    cell.b.setZero();

    std::vector<Mat> xs{Mat::Zero(1, 2)};
    std::vector<Mat> out;

    // zero state: gates 0.5, cell' = 0, hidden' = 0
    cell.forward(xs, out);
    CHECK(out[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK((cell.gates_[0].topRows(6).array() - 0.5).abs().maxCoeff() == 0.0);

    // cell state 1: cell' = 0.5, hidden' = 0.5*tanh(0.5)
    const Mat c0 = Mat::Ones(3, 2);
    cell.forward(xs, out, nullptr, &c0);
    CHECK(cell.cs_[0](0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out[0](0, 0) == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-9));
    CHECK(out[0](0, 0) == doctest::Approx(0.23106).epsilon(1e-4));
}

TEST_CASE("bidirectional symmetry and single-step equivalence") {
    Rng rng(5);
    BidirectionalLayer bi;
    bi.init(CellKind::gru, 1, 4, true, rng);
    // tie the two directions
    bi.bwd.wx = bi.fwd.wx;
    bi.bwd.wh = bi.fwd.wh;
    bi.bwd.b = bi.fwd.b;

    const std::size_t len = 7;
    std::vector<Mat> xs(len);
    for (std::size_t t = 0; t < len; ++t) xs[t] = Mat::Constant(1, 1, 0.0);
    // palindromic input
    const double vals[7] = {0.3, -1.0, 0.7, 0.2, 0.7, -1.0, 0.3};
    for (std::size_t t = 0; t < len; ++t) xs[t](0, 0) = vals[t];

    std::vector<Mat> out;
    bi.forward(xs, out);
    for (std::size_t t = 0; t < len; ++t) {
        const Mat f = out[t].topRows(4);
        const Mat b = out[len - 1 - t].bottomRows(4);
        CHECK((f - b).cwiseAbs().maxCoeff() < 1e-12);
    }

    // length-1 sequence equals two independent single-step cells
    std::vector<Mat> one{Mat::Constant(1, 3, 0.4)};
    std::vector<Mat> bi_out, f_out, b_out;
    bi.forward(one, bi_out);
    bi.fwd.forward(one, f_out);
    bi.bwd.forward(one, b_out);
    CHECK((bi_out[0].topRows(4) - f_out[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((bi_out[0].bottomRows(4) - b_out[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("attention: single position weight and row normalisation") {
    Rng rng(6);
    AttentionBlock blk;
    blk.init(8, 4, 8, 0.0, rng);

    const Mat x1 = random_input(8, 3, 7);  // L=1, B=3
    blk.forward(x1, 1, false, rng);
    for (const auto& a : blk.attention_weights()) {
        CHECK(a.rows() == 1);
        CHECK(a(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    }

    const Mat x = random_input(8, 5 * 2, 8);  // L=5, B=2
    blk.forward(x, 5, false, rng);
    for (const auto& a : blk.attention_weights()) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            CHECK(a.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    AttentionBlock bad;
    CHECK_THROWS_AS(bad.init(10, 4, 8, 0.0, rng), ContractError);
}

TEST_CASE("loss values") {
    Mat p(1, 2);
    p << 1.0, 0.0;
    CHECK(bce_loss(p, {1, 0}) == doctest::Approx(0.0).epsilon(1e-9));
    p << 0.5, 0.5;
    CHECK(bce_loss(p, {0, 1}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    Mat p2(1, 1);
    p2 << 0.9;
    CHECK(bce_loss(p2, {1}) == doctest::Approx(0.10536).epsilon(1e-4));

    // sigmoid outputs stay in (0,1) and the loss stays finite at saturation
    Mat psat(1, 2);
    psat << 1e-300, 1.0 - 1e-16;
    CHECK(std::isfinite(bce_loss(psat, {1, 0})));
}

TEST_CASE("adam: zero gradient fixpoint and unit first step") {
    ModelSpec spec = ModelSpec::defaults(Family::fcnn, 8);
    spec.hidden = 8;
    Model m(spec, 42);
    auto params = m.params();
    m.zero_grads();
    AdamState st;
    const auto before = m.flatten();
    adam_step(params, st);
    CHECK(m.flatten() == before);

    // constant gradient: first-step magnitude is lr regardless of |g|
    for (double g : {5.0, 1e-3}) {
        Model m2(spec, 43);
        auto p2 = m2.params();
        AdamState st2;
        const auto b2 = m2.flatten();
        for (auto& p : p2) p.grad->setConstant(g);
        adam_step(p2, st2);
        const auto a2 = m2.flatten();
        for (std::size_t i = 0; i < a2.size(); ++i) {
            CHECK(std::abs(std::abs(a2[i] - b2[i]) - st2.lr) < st2.lr * 2e-2);
        }
    }
}

TEST_CASE("gradient checks across all families") {
    struct Case {
        Family family;
        int input_len;
        int hidden;
        int classes;
        double tol;
    };
    const Case cases[] = {
        {Family::fcnn, 12, 16, 2, 1e-6},
        {Family::srnn, 7, 8, 2, 1e-5},
        {Family::gru, 7, 8, 2, 1e-5},
        {Family::lstm, 7, 8, 2, 1e-5},
        {Family::bi_srnn, 7, 8, 2, 1e-5},
        {Family::bi_gru, 7, 8, 2, 1e-5},
        {Family::bi_lstm, 7, 8, 2, 1e-5},
        {Family::transformer, 16, 8, 2, 1e-5},
        {Family::lstm, 7, 8, 4, 1e-5},  // softmax head
        {Family::fcnn, 12, 16, 4, 1e-6},
    };
    for (const auto& c : cases) {
        ModelSpec spec = ModelSpec::defaults(c.family, c.input_len, c.classes);
        spec.hidden = c.hidden;
        if (c.family == Family::transformer) spec.ffn_dim = 8;
        Model model(spec, 7 + static_cast<std::uint64_t>(c.input_len));
        const Mat x = random_input(c.input_len, 6, 11);
        const auto labels = random_labels(6, c.classes, 12);
        const auto report = grad_check(model, x, labels, 1e-5, 60, 13);
        INFO("family ", family_name(c.family), " classes ", c.classes, " worst ",
             report.worst_param);
        CHECK(report.max_rel_error < c.tol);
    }
}

TEST_CASE("forward determinism and training-step determinism") {
    ModelSpec spec = ModelSpec::defaults(Family::lstm, 12);
    spec.hidden = 12;
    Model a(spec, 99), b(spec, 99);
    CHECK(a.flatten() == b.flatten());

    const Mat x = random_input(12, 32, 21);
    const auto labels = random_labels(32, 2, 22);
    AdamState sa, sb;
    for (int step = 0; step < 5; ++step) {
        for (Model* m : {&a, &b}) {
            AdamState& st = (m == &a) ? sa : sb;
            m->zero_grads();
            m->forward(x, true, nullptr);
            m->backward(labels);
            auto params = m->params();
            adam_step(params, st);
        }
    }
    CHECK(a.flatten() == b.flatten());

    const Mat pa = a.forward(x);
    const Mat pb = b.forward(x);
    CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pa.array() > 0.0).all());
    CHECK((pa.array() < 1.0).all());
}

TEST_CASE("parameter counts approach the reference table") {
    const auto lstm = ModelSpec::defaults(Family::lstm, 28);
    CHECK(Model(lstm, 1).param_count() == 49985);

    const auto bi = ModelSpec::defaults(Family::bi_lstm, 28);
    const double bi_n = static_cast<double>(Model(bi, 1).param_count());
    CHECK(bi_n > 0.5 * 120000);
    CHECK(bi_n < 1.5 * 120000);

    const auto tr = ModelSpec::defaults(Family::transformer, 28);
    const double tr_n = static_cast<double>(Model(tr, 1).param_count());
    CHECK(tr_n > 0.5 * 400000);
    CHECK(tr_n < 1.5 * 400000);
}

TEST_CASE("checkpoint round trip and typed errors") {
    ModelSpec spec = ModelSpec::defaults(Family::gru, 10);
    spec.hidden = 12;
    TrainedModel tm{spec, Model(spec, 5), {{"note", "test"}}};

    const std::string path = "test_model.ftnm";
    save_model(tm, path);
    auto back = load_model(path);
    CHECK(back.model.flatten() == tm.model.flatten());
    CHECK(back.metadata.at("note") == "test");

    // identical inference on fresh random inputs
    for (int trial = 0; trial < 10; ++trial) {
        const Mat x = random_input(10, 100, 100 + static_cast<std::uint64_t>(trial));
        const Mat pa = tm.model.forward(x);
        const Mat pb = back.model.forward(x);
        CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
    }

    // corrupt payload byte -> checksum error
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(-32, std::ios::end);
        char c = 0;
        f.read(&c, 1);
        f.seekp(-32, std::ios::end);
        c ^= 0x40;
        f.write(&c, 1);
    }
    CHECK_THROWS_AS(load_model(path), ChecksumError);

    save_model(tm, path);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        const auto pos = all.find("\"version\":1");
        REQUIRE(pos != std::string::npos);
        f.seekp(static_cast<std::streamoff>(pos + 10));
        f.write("7", 1);
    }
    CHECK_THROWS_AS(load_model(path), VersionError);

    save_model(tm, path);
    {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), static_cast<std::streamsize>(all.size() - 64));
    }
    CHECK_THROWS_AS(load_model(path), TruncatedFileError);
    std::remove(path.c_str());
}
