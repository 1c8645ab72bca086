#include <catch2/catch_amalgamated.hpp>

#include "medtag/corpus.hpp"
#include "medtag/extract.hpp"
#include "medtag/generator.hpp"

using namespace medtag;

namespace {

Conversation tiny_conversation() {
  Conversation conv;
  conv.id = "c0";
  Utterance u0;
  u0.index = 0;
  u0.speaker = SpeakerRole::Doctor;
  u0.text = "good morning";
  Utterance u1;
  u1.index = 1;
  u1.speaker = SpeakerRole::Patient;
  u1.text = "i have been having palpitations lately";
  u1.labels.set(Task::Sym);
  conv.utterances = {u0, u1};
  conv.gold_extraction[static_cast<int>(Task::Sym)] = {"Cardiovascular"};
  return conv;
}

}  // namespace

TEST_CASE("parse minimal well-formed corpus") {
  const std::string line =
      R"({"id":"c0","utterances":[{"idx":0,"speaker":"DR","text":"hello","labels":[]},)"
      R"({"idx":1,"speaker":"PT","text":"hi","labels":["SYM"]}]})"
      "\n";
  const auto convs = parse_corpus_text(line);
  REQUIRE(convs.size() == 1);
  REQUIRE(convs[0].utterances.size() == 2);
  CHECK(convs[0].utterances[0].speaker == SpeakerRole::Doctor);
  CHECK(convs[0].utterances[1].labels.get(Task::Sym));
  CHECK_FALSE(convs[0].utterances[1].labels.get(Task::Med));
}

TEST_CASE("unknown speaker code is an error naming the line") {
  const std::string line =
      R"({"id":"c0","utterances":[{"idx":0,"speaker":"XX","text":"hello","labels":[]}]})";
  CHECK_THROWS_WITH(parse_corpus_text(line),
                    Catch::Matchers::ContainsSubstring("line 1") &&
                        Catch::Matchers::ContainsSubstring("XX"));
}

TEST_CASE("malformed JSON line is an error naming the line") {
  CHECK_THROWS_WITH(parse_corpus_text("{not json}\n"),
                    Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("non-contiguous utterance indices rejected") {
  const std::string line =
      R"({"id":"c0","utterances":[{"idx":0,"speaker":"DR","text":"a"},{"idx":2,"speaker":"PT","text":"b"}]})";
  CHECK_THROWS_AS(parse_corpus_text(line), DataError);
}

TEST_CASE("unknown gold extraction label rejected") {
  const std::string line =
      R"({"id":"c0","utterances":[{"idx":0,"speaker":"DR","text":"a"}],"gold_extraction":{"SYM":["NotALabel"]}})";
  CHECK_THROWS_AS(parse_corpus_text(line), DataError);
}

TEST_CASE("write/parse round trip is byte identical on canonical output") {
  const auto convs = synth_generate(GeneratorProfile{}, 5, 99);
  const std::string text = corpus_to_text(convs);
  const auto reparsed = parse_corpus_text(text);
  REQUIRE(reparsed.size() == convs.size());
  CHECK(reparsed == convs);
  CHECK(corpus_to_text(reparsed) == text);
}

TEST_CASE("split sizes and partition property") {
  auto convs = synth_generate(GeneratorProfile{}, 10, 3);
  const auto split = split_corpus(convs, 2, 3, 42);
  CHECK(split.train.size() == 5);
  CHECK(split.val.size() == 2);
  CHECK(split.test.size() == 3);

  std::set<std::string> ids;
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (const auto& c : *part) ids.insert(c.id);
  }
  CHECK(ids.size() == convs.size());

  const auto split2 = split_corpus(convs, 2, 3, 42);
  CHECK(split2.train == split.train);
  CHECK(split2.val == split.val);
  CHECK(split2.test == split.test);
}

TEST_CASE("split rejects oversized counts") {
  auto convs = synth_generate(GeneratorProfile{}, 10, 3);
  CHECK_THROWS_AS(split_corpus(convs, 11, 0, 1), DataError);
}

TEST_CASE("stats on a hand-built conversation") {
  Conversation conv;
  conv.id = "c";
  for (int i = 0; i < 4; ++i) {
    Utterance u;
    u.index = i;
    u.speaker = SpeakerRole::Doctor;
    u.text = "x";
    if (i == 1) u.labels.set(Task::Sym);
    conv.utterances.push_back(u);
  }
  const auto stats = compute_stats({conv});
  CHECK(stats.mean_fraction[static_cast<int>(Task::Sym)] == Catch::Approx(0.25));
  CHECK(stats.mean_first_position[static_cast<int>(Task::Sym)] == Catch::Approx(0.25));
  // No medication utterances: excluded from the mean rather than counted as 0.
  CHECK(stats.conversations_with[static_cast<int>(Task::Med)] == 0);
  CHECK(stats.mean_first_position[static_cast<int>(Task::Med)] == 0.0);
}

TEST_CASE("compute_stats rejects an empty list") {
  CHECK_THROWS_AS(compute_stats({}), DataError);
}

TEST_CASE("generator determinism") {
  const auto a = synth_generate(GeneratorProfile{}, 1, 7);
  const auto b = synth_generate(GeneratorProfile{}, 1, 7);
  CHECK(a == b);
}

TEST_CASE("generator fractions match the calibration targets") {
  const auto convs = synth_generate(GeneratorProfile{}, 250, 11);
  const auto stats = compute_stats(convs);
  CHECK(stats.mean_fraction[static_cast<int>(Task::Com)] == Catch::Approx(0.0434).margin(0.02));
  CHECK(stats.mean_fraction[static_cast<int>(Task::Sym)] == Catch::Approx(0.0198).margin(0.02));
  CHECK(stats.mean_fraction[static_cast<int>(Task::Med)] == Catch::Approx(0.0310).margin(0.02));
}

TEST_CASE("generator first-mention positions approximate the targets") {
  const auto convs = synth_generate(GeneratorProfile{}, 500, 17);
  const auto stats = compute_stats(convs);
  const double com = stats.mean_first_position[static_cast<int>(Task::Com)];
  CHECK(com >= 0.08);
  CHECK(com <= 0.19);
  CHECK(stats.mean_first_position[static_cast<int>(Task::Sym)] ==
        Catch::Approx(0.321).margin(0.06));
  CHECK(stats.mean_first_position[static_cast<int>(Task::Med)] ==
        Catch::Approx(0.524).margin(0.07));
}

TEST_CASE("decoy-free corpora place surfaces only in matching labeled utterances") {
  GeneratorProfile profile;
  profile.decoy_fraction = 0.0;
  const auto convs = synth_generate(profile, 40, 5);
  const auto& dict = ConceptDictionary::builtin();
  for (const auto& conv : convs) {
    for (const auto& utt : conv.utterances) {
      for (const auto& m : match_concepts(utt.text, dict)) {
        if (!m.exact) continue;
        CHECK(utt.labels.get(m.task));
      }
    }
  }
}

TEST_CASE("generator gold equals oracle extraction over labeled utterances") {
  GeneratorProfile profile;
  profile.decoy_fraction = 0.15;
  const auto convs = synth_generate(profile, 30, 21);
  const auto& dict = ConceptDictionary::builtin();
  const auto& map = ExtractionLabelMap::builtin();
  for (const auto& conv : convs) {
    for (Task task : kAllTasks) {
      FilterSpec spec{FilterMode::OracleCategory, task, 0.0};
      const auto subset = filter_utterances(conv, nullptr, spec);
      const auto labels = extract_labels(conv, subset, dict, map, task);
      CHECK(labels == conv.gold_extraction[static_cast<int>(task)]);
    }
  }
}

TEST_CASE("stats CSV export shape") {
  const auto convs = synth_generate(GeneratorProfile{}, 3, 2);
  const std::string csv = stats_to_csv(compute_stats(convs));
  CHECK(csv.rfind("metric,value\n", 0) == 0);
  CHECK(csv.find("mean_fraction_SYM,") != std::string::npos);
}

TEST_CASE("tiny conversation JSON round trip preserves gold") {
  const Conversation conv = tiny_conversation();
  const std::string text = corpus_to_text({conv});
  const auto parsed = parse_corpus_text(text);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0] == conv);
}
