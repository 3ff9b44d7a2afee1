#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "gradient_check.hpp"
#include "rnntc/errors.hpp"
#include "rnntc/trained_model.hpp"
#include "temp_dir.hpp"

using namespace rnntc;

namespace {

TrainedModel sample(CellKind kind, std::uint64_t seed) {
    auto cfg = rnntc::testing::small_check_config(kind);
    cfg.vocab_capacity = 3;
    cfg.strict_paper_gru_bias = kind == CellKind::Gru && seed % 2 == 0;
    TrainedModel m{rnntc::testing::random_model(cfg, seed),
                   default_class_names(),
                   Vocabulary({"engine", "fail", "runway"}, {5, 3, 1}),
                   {},
                   {seed, "00000000000000aa", "00000000000000bb", "00000000000000cc", 17}};
    m.encoding.seq_len = cfg.seq_len;
    m.encoding.pad = PadSide::Post;
    // Values whose shortest decimal form is long, to exercise round-tripping.
    auto v = m.model.params().values();
    v[0] = 0.1 + 0.2;
    v[1] = std::numeric_limits<double>::denorm_min();
    v[2] = -std::numeric_limits<double>::max();
    v[3] = 1.0 / 3.0;
    return m;
}

}  // namespace

TEST_CASE("model file round-trips bitwise") {
    rnntc::testing::TempDir dir;
    for (const auto kind : kAllCellKinds) {
        for (std::uint64_t seed : {1ULL, 2ULL}) {
            CAPTURE(to_string(kind));
            const auto m = sample(kind, seed);
            const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
            CHECK(back == m);
            CHECK(back.vocabulary.id_of("fail") == 3);
            const auto path = dir / (std::string(to_string(kind)) + ".json");
            save_model(m, path);
            const auto loaded = load_model(path);
            CHECK(loaded == m);
            const auto a = loaded.model.params().values();
            const auto b = m.model.params().values();
            CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end(),
                             [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }));
            save_model(loaded, dir / "again.json");
            CHECK(rnntc::testing::read_text(path) == rnntc::testing::read_text(dir / "again.json"));
        }
    }
}

TEST_CASE("model file records the head input dimension") {
    const auto j = model_to_json(sample(CellKind::Blstm, 1));
    CHECK(j.at("config").at("head_input_dim") == 16);
    CHECK(j.at("format") == "rnntc-model");
    CHECK(j.at("version") == "1.0");
    CHECK(model_to_json(sample(CellKind::Lstm, 1)).at("config").at("head_input_dim") == 8);
}

TEST_CASE("model file validation") {
    const auto good = model_to_json(sample(CellKind::Lstm, 1));
    auto j = good;
    j["version"] = "2.0";
    CHECK_THROWS_AS(model_from_json(j), InputError);
    j["version"] = "1.7";
    CHECK(model_from_json(j) == sample(CellKind::Lstm, 1));
    j = good;
    j["version"] = "banana";
    CHECK_THROWS_AS(model_from_json(j), InputError);
    j = good;
    j["format"] = "something-else";
    CHECK_THROWS_AS(model_from_json(j), InputError);
    j = good;
    j["parameters"]["cell.W_f"]["rows"] = 3;
    CHECK_THROWS_AS(model_from_json(j), InputError);
    j = good;
    j["parameters"].erase("output.b");
    CHECK_THROWS_AS(model_from_json(j), InputError);
    j = good;
    j["class_names"] = {"a", "b"};
    CHECK_THROWS_AS(model_from_json(j), InputError);
    j = good;
    j["vocabulary"].push_back("extra");
    CHECK_THROWS_AS(model_from_json(j), InputError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), InputError);

    rnntc::testing::TempDir dir;
    rnntc::testing::write_text(dir / "bad.json", "{not json");
    CHECK_THROWS_AS(load_model(dir / "bad.json"), InputError);
}
