// mnemo: keyword ranking, cue/deck generation, the study server, scoring and
// analysis from one command line.

#include <CLI11.hpp>

#include <csignal>
#include <functional>
#include <fstream>
#include <iostream>

#include "mnemo/analysis.hpp"
#include "mnemo/csv.hpp"
#include "mnemo/cuegen.hpp"
#include "mnemo/http_api.hpp"
#include "mnemo/keywordgen.hpp"
#include "mnemo/responses.hpp"
#include "mnemo/service.hpp"
#include "mnemo/simulate.hpp"
#include "mnemo/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct KeywordsArgs {
  std::string word;
  std::string meaning;
  std::string deck;
  fs::path data_dir = "data";
  std::size_t k = 5;
  std::string weights = "1,1,1,1";
  bool as_json = false;
};

int run_keywords(const KeywordsArgs& a) {
  const auto features = mnemo::load_feature_table(a.data_dir / "features.tsv");
  const auto dict = mnemo::load_pronunciations(a.data_dir / "pronunciations.tsv", features);
  const auto imageability = mnemo::load_imageability(a.data_dir / "imageability.tsv");
  const auto vectors = mnemo::load_word_vectors(a.data_dir / "vectors.txt");

  std::string meaning = a.meaning;
  if (meaning.empty() && !a.deck.empty()) {
    const auto deck = mnemo::load_deck(a.deck);
    if (const auto* e = deck.find(a.word)) meaning = e->l1_meaning;
  }
  if (meaning.empty()) throw mnemo::ContractError("no meaning for '" + a.word + "'; pass --meaning or --deck");
  const auto* pron = dict.find(a.word);
  if (!pron) throw mnemo::ContractError("no pronunciation for '" + a.word + "'");

  const mnemo::KeywordTarget target{a.word, *pron, meaning};
  const mnemo::KeywordResources res{vectors, imageability, features};
  const auto ranking =
      mnemo::rank_keywords(target, mnemo::candidate_pool(imageability, dict), mnemo::ScoreWeights::parse(a.weights), res, a.k);

  if (a.as_json) {
    json out = json::array();
    for (const auto& c : ranking.top) {
      out.push_back({{"keyword", c.keyword},
                     {"phonetic", c.phonetic},
                     {"orthographic", c.orthographic},
                     {"imageability", c.imageability},
                     {"semantic", c.semantic},
                     {"total", c.total}});
    }
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "keyword,phonetic,orthographic,imageability,semantic,total\n";
    for (const auto& c : ranking.top) {
      mnemo::write_csv_row(std::cout, {c.keyword, mnemo::format_double(c.phonetic), mnemo::format_double(c.orthographic),
                                       mnemo::format_double(c.imageability), mnemo::format_double(c.semantic),
                                       mnemo::format_double(c.total)});
    }
  }
  for (const auto& s : ranking.skipped) std::cerr << "skipped " << s.word << ": " << s.reason << '\n';
  return 0;
}

struct GenerateArgs {
  fs::path words;
  fs::path out = "deck.json";
  fs::path media_dir;
  std::string name = "deck";
  std::string provider = "mock";
  std::int64_t seed = 0;
  double temperature = 0.5;
  int retries = 3;
};

int run_generate(const GenerateArgs& a) {
  mnemo::ProviderConfig config;
  config.kind = a.provider == "live" ? mnemo::ProviderKind::kLive : mnemo::ProviderKind::kMock;
  config.seed = a.seed;
  config.temperature = a.temperature;
  config.retry_limit = a.retries;
  auto providers = mnemo::make_providers(config);

  mnemo::DeckGenerationOptions options;
  options.deck_name = a.name;
  options.media_dir = a.media_dir.empty() ? a.out.parent_path() / "media" : a.media_dir;
  const auto result = mnemo::generate_deck(mnemo::load_word_specs(a.words), *providers.text, *providers.image, config, options);
  for (const auto& f : result.failures) std::cerr << "failed " << f.l2_word << " (" << f.stage << "): " << f.message << '\n';
  mnemo::validate_deck(result.deck);  // refuse to write an unbalanced deck
  mnemo::save_deck(result.deck, a.out);
  std::cerr << "wrote " << result.deck.entries.size() << " entries to " << a.out.string() << '\n';
  return result.failures.empty() ? 0 : 2;
}

struct ScoreArgs {
  fs::path deck;
  fs::path responses;
  fs::path vectors = "data/vectors.txt";
  fs::path out;
};

void with_output(const fs::path& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw mnemo::Error("cannot write " + path.string());
  write(f);
}

int run_score(const ScoreArgs& a) {
  const auto deck = mnemo::load_deck(a.deck);
  const auto store = mnemo::load_word_vectors(a.vectors);
  const auto scored = mnemo::score_responses(deck, store, mnemo::read_responses(a.responses));
  with_output(a.out, [&](std::ostream& o) { mnemo::write_scored(o, scored); });
  return 0;
}

struct AnalyzeArgs {
  fs::path sessions = "sessions";
  fs::path deck;
  fs::path vectors = "data/vectors.txt";
  fs::path exclude;
  fs::path out = "analysis";
  std::string unit = "word";
};

std::vector<std::string> read_ids(const fs::path& path) {
  std::vector<std::string> ids;
  if (path.empty()) return ids;
  std::ifstream in(path);
  if (!in) throw mnemo::LoadError(path.string(), 0, "cannot open exclusion list");
  for (std::string line; std::getline(in, line);) {
    const auto id = mnemo::trim(line);
    if (!id.empty() && id[0] != '#') ids.emplace_back(id);
  }
  return ids;
}

int run_analyze(const AnalyzeArgs& a) {
  const auto deck = mnemo::load_deck(a.deck);
  const auto store = mnemo::load_word_vectors(a.vectors);
  auto report = mnemo::run_analysis(mnemo::load_sessions(a.sessions, deck), deck, store, read_ids(a.exclude),
                                    mnemo::parse_test_unit(a.unit));
  fs::create_directories(a.out);
  with_output(a.out / "participants.csv", [&](std::ostream& o) { mnemo::write_participants_csv(o, report); });
  with_output(a.out / "per_word.csv", [&](std::ostream& o) { mnemo::write_per_word_csv(o, report); });
  with_output(a.out / "tests.csv", [&](std::ostream& o) { mnemo::write_tests_csv(o, report); });
  with_output(a.out / "boxplot.csv", [&](std::ostream& o) { mnemo::write_boxplot_csv(o, report); });
  std::cerr << report.participants.size() << " participants analysed, " << report.excluded << " excluded, "
            << report.incomplete.size() << " incomplete\n";
  for (const auto& id : report.unmatched_exclusions) std::cerr << "warning: exclusion id not found: " << id << '\n';
  return 0;
}

int run_export(const fs::path& sessions, const fs::path& deck_path, const fs::path& out) {
  const auto deck = mnemo::load_deck(deck_path);
  std::vector<mnemo::ResponseRow> rows;
  for (const auto& s : mnemo::load_sessions(sessions, deck)) {
    auto r = mnemo::export_responses(s);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  with_output(out, [&](std::ostream& o) { mnemo::write_responses(o, rows); });
  return 0;
}

struct ServeArgs {
  fs::path deck;
  fs::path sessions = "sessions";
  fs::path media_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t seed = 0;
};

mnemo::HttpApi* g_api = nullptr;

int run_serve(const ServeArgs& a) {
  mnemo::ServiceOptions options;
  options.sessions_dir = a.sessions;
  options.seed = a.seed;
  mnemo::StudyService service(mnemo::load_deck(a.deck), options);
  mnemo::HttpApi api(service, a.media_dir.empty() ? a.deck.parent_path() / "media" : a.media_dir);
  const int port = api.bind(a.host, a.port);
  if (port < 0) throw mnemo::Error("cannot bind " + a.host + ":" + std::to_string(a.port));
  g_api = &api;
  std::signal(SIGINT, [](int) { if (g_api) g_api->stop(); });
  std::signal(SIGTERM, [](int) { if (g_api) g_api->stop(); });
  std::cerr << "listening on http://" << a.host << ':' << port << '\n';
  api.listen();
  g_api = nullptr;
  return 0;
}

int run_simulate(const fs::path& deck_path, const mnemo::SimulationOptions& options) {
  const auto report = mnemo::simulate_participants(mnemo::load_deck(deck_path), options);
  json out{{"sessions", report.sessions},
           {"completed", report.completed},
           {"early_attempts", report.early_attempts},
           {"early_rejected", report.early_rejected},
           {"timeouts", report.timeouts},
           {"near_limit", report.near_limit},
           {"hidden_cue_leaks", report.hidden_cue_leaks},
           {"coverage_errors", report.coverage_errors},
           {"replay_mismatches", report.replay_mismatches},
           {"messages", report.messages},
           {"ok", report.ok()}};
  std::cout << out.dump(2) << '\n';
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyword mnemonic generation and vocabulary study toolkit"};
  app.require_subcommand(1);

  KeywordsArgs kw;
  auto* keywords = app.add_subcommand("keywords", "Rank English keywords for a German word");
  keywords->add_option("word", kw.word, "German word")->required();
  keywords->add_option("--meaning", kw.meaning, "English meaning (else looked up in --deck)");
  keywords->add_option("--deck", kw.deck, "Deck JSON to look the meaning up in");
  keywords->add_option("--data-dir", kw.data_dir, "Directory with features/pronunciations/imageability/vectors")
      ->capture_default_str();
  keywords->add_option("-k", kw.k, "Number of keywords")->capture_default_str();
  keywords->add_option("--weights", kw.weights, "p,o,i,s score weights")->capture_default_str();
  keywords->add_flag("--json", kw.as_json, "Print JSON instead of CSV");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate-deck", "Generate verbal and visual cues and write a deck");
  generate->add_option("--words", gen.words, "Word list TSV")->required();
  generate->add_option("--out", gen.out, "Deck JSON output")->capture_default_str();
  generate->add_option("--media-dir", gen.media_dir, "Image directory (default: <out dir>/media)");
  generate->add_option("--name", gen.name, "Deck name")->capture_default_str();
  generate->add_option("--provider", gen.provider, "mock or live")
      ->check(CLI::IsMember({"mock", "live"}))
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Provider seed")->capture_default_str();
  generate->add_option("--temperature", gen.temperature, "Sampling temperature")->capture_default_str();
  generate->add_option("--retries", gen.retries, "Attempts per verbal cue")->check(CLI::PositiveNumber)->capture_default_str();

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Score a response CSV");
  score->add_option("--deck", sc.deck, "Deck JSON")->required();
  score->add_option("--responses", sc.responses, "participant_id,word,task,response,latency_ms")->required();
  score->add_option("--vectors", sc.vectors, "Word vectors")->capture_default_str();
  score->add_option("--out", sc.out, "Output CSV (default stdout)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Per-participant metrics, per-word table and t-tests");
  analyze->add_option("--sessions", an.sessions, "Session log directory")->capture_default_str();
  analyze->add_option("--deck", an.deck, "Deck JSON")->required();
  analyze->add_option("--vectors", an.vectors, "Word vectors")->capture_default_str();
  analyze->add_option("--exclude", an.exclude, "File of participant ids to drop, one per line");
  analyze->add_option("--out", an.out, "Output directory")->capture_default_str();
  analyze->add_option("--unit", an.unit, "word or participant")
      ->check(CLI::IsMember({"word", "participant"}))
      ->capture_default_str();

  fs::path ex_sessions = "sessions", ex_deck, ex_out;
  auto* exporter = app.add_subcommand("export", "Export recorded test responses as CSV");
  exporter->add_option("--sessions", ex_sessions, "Session log directory")->capture_default_str();
  exporter->add_option("--deck", ex_deck, "Deck JSON")->required();
  exporter->add_option("--out", ex_out, "Output CSV (default stdout)");

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Run the study HTTP API");
  serve->add_option("--deck", sv.deck, "Deck JSON")->required();
  serve->add_option("--sessions-dir", sv.sessions, "Session log directory")->capture_default_str();
  serve->add_option("--media-dir", sv.media_dir, "Media directory (default: <deck dir>/media)");
  serve->add_option("--host", sv.host, "Bind address")->capture_default_str();
  serve->add_option("--port", sv.port, "Port (0 = any free port)")->capture_default_str();
  serve->add_option("--seed", sv.seed, "Seed mixed into session seeds")->capture_default_str();

  fs::path sim_deck;
  mnemo::SimulationOptions sim;
  bool no_fsync = false;
  auto* simulate = app.add_subcommand("simulate", "Drive simulated participants through the service");
  simulate->add_option("--deck", sim_deck, "Deck JSON")->required();
  simulate->add_option("--participants", sim.participants, "Number of participants")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Simulation seed")->capture_default_str();
  simulate->add_option("--sessions-dir", sim.sessions_dir, "Session log directory")->capture_default_str();
  simulate->add_flag("--no-fsync", no_fsync, "Skip fsync on log appends");

  CLI11_PARSE(app, argc, argv);
  sim.durable_logs = !no_fsync;

  try {
    if (*keywords) return run_keywords(kw);
    if (*generate) return run_generate(gen);
    if (*score) return run_score(sc);
    if (*analyze) return run_analyze(an);
    if (*exporter) return run_export(ex_sessions, ex_deck, ex_out);
    if (*serve) return run_serve(sv);
    if (*simulate) return run_simulate(sim_deck, sim);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
