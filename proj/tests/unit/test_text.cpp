#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "rnntc/rng.hpp"
#include "rnntc/text.hpp"

using namespace rnntc;

namespace {

const NormalizationTables& tables() {
    static const NormalizationTables t = NormalizationTables::bundled();
    return t;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        out += (out.empty() ? "" : " ") + t;
    }
    return out;
}

}  // namespace

TEST_CASE("clean_text on empty input") {
    CHECK(clean_text("", tables()).empty());
    CHECK(clean_text("  \t\n ", tables()).empty());
    CHECK(clean_text("!!! ... ,,,", tables()).empty());
}

TEST_CASE("clean_text matches a per-step trace") {
    // Each stage is checked separately so a failure points at the stage.
    const std::string raw = "The engine failed.";
    const std::string lowered = normalize_characters(raw);
    CHECK(lowered == "the engine failed ");
    const auto split = split_whitespace(lowered);
    REQUIRE(split == std::vector<std::string>{"the", "engine", "failed"});
    CHECK(tables().stop_words.count("the") == 1);
    CHECK(tables().stop_words.count("engine") == 0);
    CHECK(tables().stop_words.count("failed") == 0);
    CHECK(tables().lemmas.count("failed") == 0);
    CHECK(lemmatize("engine", tables()) == "engine");
    CHECK(lemmatize("failed", tables()) == "fail");
    CHECK(clean_text(raw, tables()) == std::vector<std::string>{"engine", "fail"});
}

TEST_CASE("clean_text case-folds and strips punctuation") {
    CHECK(normalize_characters("AIRCRAFT, aircraft!") == "aircraft  aircraft ");
    CHECK(clean_text("AIRCRAFT, aircraft!", tables()) == std::vector<std::string>{"aircraft", "aircraft"});
}

TEST_CASE("apostrophes are deleted before tokenizing") {
    CHECK(normalize_characters("pilot's") == "pilots");
    CHECK(normalize_characters("pilot\xE2\x80\x99s") == "pilots");
    CHECK(clean_text("The pilot's checklist", tables()) == std::vector<std::string>{"pilot", "checklist"});
    CHECK(clean_text("didn't", tables()).empty());
}

TEST_CASE("non-ASCII bytes become separators") {
    CHECK(clean_text("caf\xC3\xA9-runway", tables()) == std::vector<std::string>{"caf", "runway"});
}

TEST_CASE("suffix rules") {
    const auto& t = tables();
    CHECK(lemmatize("landing", t) == "land");
    CHECK(lemmatize("taxiing", t) == "taxi");
    CHECK(lemmatize("stopped", t) == "stop");
    CHECK(lemmatize("rolled", t) == "roll");
    CHECK(lemmatize("batteries", t) == "battery");
    CHECK(lemmatize("passes", t) == "pass");
    CHECK(lemmatize("crashes", t) == "crash");
    CHECK(lemmatize("boxes", t) == "box");
    CHECK(lemmatize("wings", t) == "wing");
    CHECK(lemmatize("glass", t) == "glass");
    CHECK(lemmatize("status", t) == "status");
    CHECK(lemmatize("gas", t) == "gas");
    CHECK(lemmatize("ring", t) == "ring");
    CHECK(lemmatize("red", t) == "red");
}

TEST_CASE("every bundled lemma is a fixed point") {
    for (const auto& [surface, lemma] : tables().lemmas) {
        CAPTURE(surface);
        CHECK(lemmatize(lemma, tables()) == lemma);
        CHECK(lemmatize(surface, tables()) == lemma);
    }
}

TEST_CASE("table parsing skips comments and blanks") {
    const auto t = NormalizationTables::parse("# c\nfoo\n\n BAR \r\n", "# c\nran\trun\n\nmice\tmouse\r\n");
    CHECK(t.stop_words.size() == 2);
    CHECK(t.stop_words.count("bar") == 1);
    CHECK(t.lemmas.at("ran") == "run");
    CHECK(t.lemmas.at("mice") == "mouse");
    CHECK(clean_text("Foo ran", t) == std::vector<std::string>{"run"});
}

TEST_CASE("table fingerprint ignores insertion order") {
    const auto a = NormalizationTables::parse("x\ny\n", "a\tb\nc\td\n");
    const auto b = NormalizationTables::parse("y\nx\n", "c\td\na\tb\n");
    const auto c = NormalizationTables::parse("y\nz\n", "c\td\na\tb\n");
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("property: clean_text is idempotent on its joined output") {
    static const std::vector<std::string> pool = {
        "The",      "engine",  "FAILED",   "failing", "landed",  "landing", "taxiing", "batteries", "passes",
        "crashes",  "pilot's", "didn't",   "wings",   "Status",  "glass",   "hopping", "stopped", "rolled",
        "buzzes",   "tries",   "studies",  "aircraft", "was",    "and",     "it's",    "gear",    "shed",
        "Well",     "ran",     "flew",     "caught",  "hid",     "bled",    "biased",  "focused", "ties",
        "rings",    "singing", "inspecting", "wrecked", "burnt", "\xE2\x80\x99", "caf\xC3\xA9", "x", "1st",
        "123",      "a-b",     "runway/taxiway", "(damage)", "don't", "pressed", "missed", "buses", "axes"};
    static const std::vector<std::string> seps = {" ", ", ", ". ", "!\n", "\t", "--", "'"};
    Rng rng(20240601);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string raw;
        const std::size_t n = rng.below(12);
        for (std::size_t i = 0; i < n; ++i) {
            raw += pool[rng.below(pool.size())] + seps[rng.below(seps.size())];
        }
        const auto once = clean_text(raw, tables());
        CAPTURE(raw);
        CHECK(clean_text(join(once), tables()) == once);
        for (const auto& tok : once) {
            CHECK(tables().stop_words.count(tok) == 0);
            CHECK(std::all_of(tok.begin(), tok.end(),
                              [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }));
        }
    }
}
