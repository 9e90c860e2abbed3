#include <gtest/gtest.h>

#include <fstream>

#include "mnemo/cuegen.hpp"
#include "mnemo/digest.hpp"
#include "mnemo/text.hpp"
#include "test_util.hpp"

namespace mnemo {
namespace {

using testing::kDataDir;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

TEST(Prompt, ExactTemplateAndInverse) {
  EXPECT_EQ(build_verbal_prompt("flashy", "bottle"),
            "Write a short, catchy sentence that connects flashy and bottle. Start the sentence with \"Imagine\".");
  const auto parsed = parse_verbal_prompt(build_verbal_prompt("Reuben", "to call"));
  ASSERT_TRUE(parsed.has_value());
  EXPECT_EQ(parsed->first, "Reuben");
  EXPECT_EQ(parsed->second, "to call");
  EXPECT_FALSE(parse_verbal_prompt("hello").has_value());
}

TEST(MeaningHead, DropsInfinitiveMarkerAndArticles) {
  EXPECT_EQ(meaning_head("to step"), "step");
  EXPECT_EQ(meaning_head("the key"), "key");
  EXPECT_EQ(meaning_head("bottle"), "bottle");
  EXPECT_EQ(meaning_head("to"), "to");
}

TEST(Validation, AcceptsWellFormedCue) {
  EXPECT_TRUE(validate_verbal_cue("Imagine a flashy bottle.", "flashy", "bottle").ok());
  EXPECT_TRUE(validate_verbal_cue("Imagine Reuben calling out your name!", "Reuben", "to call").ok());
  // Stem match: "quarreling" shares "quar" with "quarrel".
  EXPECT_TRUE(validate_verbal_cue("Imagine Triton and his trident quarreling with the waves.", "Triton",
                                  "to quarrel")
                  .ok());
}

TEST(Validation, ReportsEachViolation) {
  const auto v = validate_verbal_cue("A duck swims.", "flashy", "bottle");
  EXPECT_EQ(v.violations, (std::vector<CueViolation>{CueViolation::kMissingImagine, CueViolation::kKeywordAbsent,
                                                      CueViolation::kMeaningAbsent}));
  EXPECT_FALSE(validate_verbal_cue("Imagined a flashy bottle", "flashy", "bottle").ok());
  // "told" shares no four-letter prefix with "tell".
  const auto sagen = validate_verbal_cue("Imagine a wagon full of stories just waiting to be told!", "wagon", "to tell");
  EXPECT_EQ(sagen.violations, (std::vector<CueViolation>{CueViolation::kMeaningAbsent}));
}

TEST(Generation, ReturnsFirstValidCue) {
  MockTextProvider provider(1);
  ProviderConfig config;
  const auto cue = generate_verbal_cue(provider, {"flashy", "bottle", "flasche"}, config);
  EXPECT_TRUE(validate_verbal_cue(cue.text, "flashy", "bottle").ok());
  EXPECT_EQ(cue.keyword, "flashy");
  EXPECT_EQ(provider.call_count(), 1u);
}

TEST(Generation, RetriesThenSucceeds) {
  MockTextProvider provider(1);
  provider.fail_first(2);
  ProviderConfig config;
  config.retry_limit = 3;
  EXPECT_NO_THROW(generate_verbal_cue(provider, {"flashy", "bottle", "flasche"}, config));
  EXPECT_EQ(provider.call_count(), 3u);
}

TEST(Generation, ExhaustedRetriesThrowWithLastCandidate) {
  MockTextProvider provider(1);
  provider.fail_first(3);
  ProviderConfig config;
  config.retry_limit = 3;
  try {
    generate_verbal_cue(provider, {"flashy", "bottle", "flasche"}, config);
    FAIL();
  } catch (const GenerationFailed& e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_EQ(e.last_candidate(), "A flashy appears.");
    EXPECT_FALSE(e.validation().ok());
  }
  EXPECT_EQ(provider.call_count(), 3u);
}

TEST(Generation, RejectsBadRequests) {
  MockTextProvider provider(1);
  ProviderConfig config;
  EXPECT_THROW(generate_verbal_cue(provider, {"", "bottle", "flasche"}, config), ContractError);
  config.retry_limit = 0;
  EXPECT_THROW(generate_verbal_cue(provider, {"flashy", "bottle", "flasche"}, config), ContractError);
}

TEST(MockText, DeterministicPerSeedAndAlwaysValid) {
  ProviderConfig config;
  const TextRequest req{build_verbal_prompt("Newman", "to take"), "m", 0.5};
  MockTextProvider a(5), b(5);
  EXPECT_EQ(a.complete(req), b.complete(req));
  for (std::int64_t seed = 0; seed < 50; ++seed) {
    MockTextProvider p(seed);
    for (const auto& [kw, meaning] : std::vector<std::pair<std::string, std::string>>{
             {"Newman", "to take"}, {"flashy", "bottle"}, {"coaster", "the kitchen"}}) {
      const auto cue = p.complete({build_verbal_prompt(kw, meaning), "m", 0.5});
      EXPECT_TRUE(validate_verbal_cue(cue, kw, meaning).ok()) << cue;
    }
  }
  EXPECT_THROW(a.complete({"free-form prompt", "m", 0.5}), ProviderError);
}

TEST(ImagePrompt, StripsLeadingImagine) {
  EXPECT_EQ(to_image_prompt("Imagine a flashy bottle."), "a flashy bottle.");
  EXPECT_EQ(to_image_prompt("Imagine, a flashy bottle."), "a flashy bottle.");
  EXPECT_EQ(to_image_prompt("Imagine Reuben calling out your name!"), "Reuben calling out your name!");
  EXPECT_THROW(to_image_prompt("A flashy bottle."), ContractError);
}

TEST(VisualCue, FileNamedByContentHash) {
  TempDir dir;
  MockImageProvider provider(3);
  ProviderConfig config;
  const VerbalCue cue{"Imagine a flashy bottle.", "flashy", "bottle"};
  const auto visual = generate_visual_cue(provider, cue, config, dir.path() / "media");
  EXPECT_EQ(visual.prompt, "a flashy bottle.");
  EXPECT_EQ(visual.image_ref, "media/" + visual.content_hash + ".bmp");
  const auto bytes = read_file(dir.path() / visual.image_ref);
  EXPECT_EQ(to_hex(sha256(bytes)), visual.content_hash);
  EXPECT_EQ(bytes.substr(0, 2), "BM");
  // Same prompt and seed, same bytes.
  EXPECT_EQ(generate_visual_cue(provider, cue, config, dir.path() / "media").content_hash, visual.content_hash);
}

TEST(MockImage, BmpLayout) {
  const auto bmp = render_digest_bmp(mock_image_digest("x", 1));
  EXPECT_EQ(bmp.size(), 54u + 8 * 8 * 3);
  EXPECT_EQ(bmp[0], 'B');
  EXPECT_EQ(bmp[1], 'M');
  EXPECT_NE(mock_image_digest("x", 1), mock_image_digest("x", 2));
  EXPECT_EQ(mock_image_digest("x", 1), sha256(std::string("x\n1")));
}

TEST(WordSpecs, LoadsShippedList) {
  const auto specs = load_word_specs(kDataDir / "words.tsv");
  ASSERT_EQ(specs.size(), 36u);
  EXPECT_EQ(specs[0].l2_word, "flasche");
  EXPECT_EQ(specs[0].keyword, "flashy");
  EXPECT_FALSE(specs[0].fixed_verbal_cue.has_value());
  EXPECT_EQ(specs[1].fixed_verbal_cue, "Imagine stepping into treason, a treacherous path that can never be undone.");
}

TEST(WordSpecs, RejectsShortRows) {
  TempDir dir;
  try {
    load_word_specs(write_file(dir / "w.tsv", "# c\nflasche\tbottle\tflashy\nrasen\tlawn\n"));
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

std::vector<WordSpec> three_words() {
  return {{"flasche", "bottle", "flashy", "flask", "Imagine a flask.", std::nullopt, std::nullopt},
          {"rufen", "to call", "Reuben", "roof", "Imagine a roof.", "Imagine Reuben calling out your name!",
           std::nullopt},
          {"rasen", "lawn", "risen", "raisins", "Imagine raisins.", std::nullopt, "audio/rasen.mp3"}};
}

TEST(Deck, GenerationIsDeterministicAndKeepsFixedCues) {
  TempDir dir;
  ProviderConfig config;
  config.seed = 9;
  DeckGenerationOptions options;
  options.media_dir = dir.path() / "media";
  MockTextProvider t1(9), t2(9);
  MockImageProvider i1(9), i2(9);
  const auto a = generate_deck(three_words(), t1, i1, config, options);
  const auto b = generate_deck(three_words(), t2, i2, config, options);
  EXPECT_EQ(a.deck, b.deck);
  EXPECT_TRUE(a.failures.empty());
  ASSERT_EQ(a.deck.entries.size(), 3u);
  EXPECT_EQ(a.deck.entries[1].auto_verbal_cue, "Imagine Reuben calling out your name!");
  EXPECT_EQ(t1.call_count(), 2u);  // the fixed cue skips the text provider
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.deck.entries[static_cast<std::size_t>(i)].set_index, i);
  EXPECT_EQ(a.deck.entries[2].audio_ref, "audio/rasen.mp3");
  EXPECT_NO_THROW(validate_deck(a.deck));
  for (const auto& e : a.deck.entries) EXPECT_TRUE(std::filesystem::exists(options.media_dir.parent_path() / *e.image_ref));
}

TEST(Deck, FailedWordsAreReportedAndSkipped) {
  TempDir dir;
  ProviderConfig config;
  DeckGenerationOptions options;
  options.media_dir = dir.path() / "media";
  MockTextProvider text(1);
  text.always_fail(true);
  MockImageProvider image(1);
  const auto r = generate_deck(three_words(), text, image, config, options);
  ASSERT_EQ(r.deck.entries.size(), 1u);
  EXPECT_EQ(r.deck.entries[0].l2_word, "rufen");
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0].stage, "verbal");

  auto words = three_words();
  words.erase(words.begin() + 1);
  EXPECT_THROW(generate_deck(words, text, image, config, options), DeckError);
}

TEST(Deck, FixedCueMustStartWithImagine) {
  TempDir dir;
  auto words = three_words();
  words[0].fixed_verbal_cue = "A flashy bottle.";
  ProviderConfig config;
  DeckGenerationOptions options;
  options.media_dir = dir.path() / "media";
  MockTextProvider text(1);
  MockImageProvider image(1);
  const auto r = generate_deck(words, text, image, config, options);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].l2_word, "flasche");
}

}  // namespace
}  // namespace mnemo
