#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfsample/enumerate.hpp"
#include "cfsample/forest.hpp"
#include "cfsample/grammar.hpp"
#include "cfsample/oracle.hpp"
#include "cfsample/recognizer.hpp"
#include "cfsample/sampler.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 empty result where nonempty was expected,
// 2 usage or input error.
constexpr int kExitEmpty = 1;
constexpr int kExitUsage = 2;

using cfsample::CNFGrammar;
using cfsample::CountTable;
using cfsample::Grammar;
using cfsample::PorousString;
using cfsample::SamplerConfig;
using cfsample::TreeCount;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open grammar file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Hash of the grammar as parsed (whitespace and comments do not matter).
std::string grammar_hash(const Grammar& g) {
  std::string text;
  for (const auto& p : g.productions) {
    text += p.lhs;
    text += " ->";
    for (const auto& s : p.rhs) {
      text += ' ';
      text += s.name;
    }
    text += '\n';
  }
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Instance {
  Grammar source;
  CNFGrammar cnf;
  PorousString porous;

  Instance(const std::string& grammar_path, const std::string& porous_text)
      : source(cfsample::parse_grammar(read_file(grammar_path))),
        cnf(cfsample::to_cnf(source)),
        porous(PorousString::parse(porous_text)) {}
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CFSAMPLE_SEED")) {
    try {
      std::size_t used = 0;
      std::string text(env);
      std::uint64_t v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("CFSAMPLE_SEED is not a 64-bit unsigned integer");
    }
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string format_tree(const cfsample::DerivationTree& t, const CNFGrammar& g,
                        const std::string& format) {
  if (format == "yield") {
    auto toks = cfsample::yield_of(t, g);
    std::string line;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) line += ' ';
      line += toks[i];
    }
    return line;
  }
  return cfsample::to_sexpr(t, g);
}

nlohmann::json base_metadata(const Instance& inst, const TreeCount& count) {
  return {{"grammar_hash", grammar_hash(inst.source)},
          {"porous", inst.porous.to_string()},
          {"count", count.str()},
          {"version", kVersion}};
}

int cmd_recognize(const std::string& grammar_path, const std::string& porous_text) {
  Instance inst(grammar_path, porous_text);
  std::cout << (cfsample::recognize(inst.cnf, inst.porous) ? "true" : "false") << '\n';
  return 0;
}

int cmd_count(const std::string& grammar_path, const std::string& porous_text) {
  Instance inst(grammar_path, porous_text);
  auto forest = cfsample::build_forest(inst.cnf, inst.porous);
  auto root = cfsample::root_forest(forest, inst.cnf);
  std::cout << cfsample::count_trees(root).str() << '\n';
  return 0;
}

int cmd_cnf(const std::string& grammar_path) {
  Grammar source = cfsample::parse_grammar(read_file(grammar_path));
  CNFGrammar cnf = cfsample::to_cnf(source);
  for (const auto& r : cnf.binary_rules()) std::cout << cnf.rule_to_string(r) << '\n';
  for (const auto& r : cnf.terminal_rules()) std::cout << cnf.rule_to_string(r) << '\n';
  return 0;
}

struct SampleArgs {
  std::string grammar_path, porous_text;
  std::string k_text;
  std::optional<std::uint64_t> seed_flag;
  std::string mode = "wr";
  std::string weighting = "count";
  std::string weights_path;
  std::string format = "sexpr";
  int jobs = 0;
};

cfsample::Weighting parse_weighting(const std::string& name) {
  if (name == "count") return cfsample::Weighting::count_proportional;
  if (name == "rule-uniform") return cfsample::Weighting::rule_uniform;
  return cfsample::Weighting::explicit_weights;
}

std::map<std::string, double> load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weights file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (!doc.is_object()) throw std::runtime_error("weights file must be a JSON object");
  std::map<std::string, double> out;
  for (auto& [rule, w] : doc.items()) {
    if (!w.is_number()) throw std::runtime_error("weight of \"" + rule + "\" is not a number");
    out[rule] = w.get<double>();
  }
  return out;
}

int cmd_sample(const SampleArgs& args) {
  Instance inst(args.grammar_path, args.porous_text);
  const std::uint64_t seed = resolve_seed(args.seed_flag);

  const bool wor = args.mode == "wor";
  std::optional<TreeCount> k;
  if (args.k_text == "ALL") {
    if (!wor) throw std::runtime_error("--k ALL requires --mode wor");
  } else {
    try {
      k = TreeCount(args.k_text);
      if (*k < 0) throw std::invalid_argument(args.k_text);
    } catch (const std::exception&) {
      throw std::runtime_error("--k must be a nonnegative integer or ALL");
    }
  }

  SamplerConfig cfg;
  cfg.mode = wor ? cfsample::SampleMode::without_replacement
                 : cfsample::SampleMode::with_replacement;
  cfg.weighting = parse_weighting(args.weighting);
  cfg.seed = seed;
  cfg.sample_count = k;
  if (cfg.weighting == cfsample::Weighting::explicit_weights) {
    if (args.weights_path.empty())
      throw std::runtime_error("--weighting explicit requires --weights FILE");
    cfg.rule_weights = load_weights(args.weights_path);
  } else if (!args.weights_path.empty()) {
    throw std::runtime_error("--weights requires --weighting explicit");
  }
  if (wor && cfg.weighting != cfsample::Weighting::count_proportional)
    throw std::runtime_error("--mode wor ignores weightings; omit --weighting");

  auto forest = cfsample::build_forest(inst.cnf, inst.porous);
  auto root = cfsample::root_forest(forest, inst.cnf);
  CountTable counts(root);
  const TreeCount total = root ? counts.count(root.get()) : TreeCount(0);

  nlohmann::json meta = base_metadata(inst, total);
  meta["seed"] = seed;
  meta["mode"] = args.mode;
  meta["weighting"] = args.weighting;

  if (total == 0 && k && *k > 0) {
    std::cerr << meta.dump() << '\n';
    std::cerr << "error: no trees to sample (count is 0)" << '\n';
    return kExitEmpty;
  }

  if (!wor) {
    // k validated as an integer above
    cfsample::SampleRng rng(seed);
    std::cerr << meta.dump() << '\n';
    for (TreeCount i = 0; i < *k; ++i) {
      auto t = cfsample::gamma_sample(root, inst.cnf, counts, cfg, rng);
      std::cout << format_tree(*t, inst.cnf, args.format) << '\n';
    }
    return 0;
  }

  cfsample::TreeSampleStream stream(root, counts, k, seed);
  meta["index_mode"] =
      stream.indices().kind() == cfsample::FullCycleIndexStream::Kind::full_cycle
          ? "full-cycle"
          : "rejection-dedup";
  std::cerr << meta.dump() << '\n';

  if (args.jobs > 1) {
    // Chunked: indices stay in stream order, decoding fans out per chunk.
    std::vector<TreeCount> chunk;
    for (;;) {
      chunk.clear();
      while (chunk.size() < 4096) {
        auto idx = stream.next_index();
        if (!idx) break;
        chunk.push_back(std::move(*idx));
      }
      if (chunk.empty()) break;
      for (const auto& t : cfsample::decode_batch(root, counts, chunk, args.jobs))
        std::cout << format_tree(*t, inst.cnf, args.format) << '\n';
    }
  } else {
    while (auto t = stream.next()) std::cout << format_tree(**t, inst.cnf, args.format) << '\n';
  }
  return 0;
}

int cmd_enumerate(const std::string& grammar_path, const std::string& porous_text,
                  const std::string& format, bool oracle) {
  Instance inst(grammar_path, porous_text);
  if (oracle) {
    auto set = cfsample::oracle_tree_set(inst.cnf, inst.porous);
    for (const auto& s : set.sexprs) std::cout << s << '\n';
    return 0;
  }
  auto forest = cfsample::build_forest(inst.cnf, inst.porous);
  auto root = cfsample::root_forest(forest, inst.cnf);
  if (!root) return 0;
  CountTable counts(root);
  const TreeCount total = counts.count(root.get());
  for (TreeCount i = 0; i < total; ++i) {
    auto t = cfsample::phi(root, i, counts);
    std::cout << format_tree(*t, inst.cnf, format) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  CLI::App app{"Count, enumerate, and sample derivation trees of context-free "
               "strings with holes"};
  app.require_subcommand(1);

  std::string grammar_path, porous_text, format = "sexpr";
  bool oracle = false;
  SampleArgs sample;

  auto* rec = app.add_subcommand("recognize", "Is some completion of the string derivable?");
  rec->add_option("grammar", grammar_path, "grammar file")->required();
  rec->add_option("string", porous_text, "tokens separated by spaces, _ is a hole")->required();

  auto* cnt = app.add_subcommand("count", "Number of derivation trees over all completions");
  cnt->add_option("grammar", grammar_path, "grammar file")->required();
  cnt->add_option("string", porous_text, "tokens separated by spaces, _ is a hole")->required();

  auto* smp = app.add_subcommand("sample", "Sample derivation trees");
  smp->add_option("grammar", sample.grammar_path, "grammar file")->required();
  smp->add_option("string", sample.porous_text, "tokens separated by spaces, _ is a hole")
      ->required();
  smp->add_option("--k", sample.k_text, "number of samples, or ALL (wor only)")->required();
  smp->add_option("--seed", sample.seed_flag, "64-bit seed (default: CFSAMPLE_SEED or entropy)");
  smp->add_option("--mode", sample.mode, "wr = with replacement, wor = without")
      ->check(CLI::IsMember({"wr", "wor"}));
  smp->add_option("--weighting", sample.weighting,
                  "wr child-pair weighting: count (uniform over trees), rule-uniform, explicit")
      ->check(CLI::IsMember({"count", "rule-uniform", "explicit"}));
  smp->add_option("--weights", sample.weights_path,
                  "JSON file mapping rule text (see cnf subcommand) to weight");
  smp->add_option("--format", sample.format, "sexpr or yield")
      ->check(CLI::IsMember({"sexpr", "yield"}));
  smp->add_option("--jobs", sample.jobs, "decode indices with N threads (wor only)");

  auto* enu = app.add_subcommand("enumerate", "Print every derivation tree in index order");
  enu->add_option("grammar", grammar_path, "grammar file")->required();
  enu->add_option("string", porous_text, "tokens separated by spaces, _ is a hole")->required();
  enu->add_option("--format", format, "sexpr or yield")
      ->check(CLI::IsMember({"sexpr", "yield"}));
  enu->add_flag("--oracle", oracle, "use the brute-force reference (sorted sexprs)");

  auto* cnf = app.add_subcommand("cnf", "Print the normalized rules (weights file keys)");
  cnf->add_option("grammar", grammar_path, "grammar file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (rec->parsed()) return cmd_recognize(grammar_path, porous_text);
    if (cnt->parsed()) return cmd_count(grammar_path, porous_text);
    if (smp->parsed()) return cmd_sample(sample);
    if (enu->parsed()) return cmd_enumerate(grammar_path, porous_text, format, oracle);
    if (cnf->parsed()) return cmd_cnf(grammar_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
