#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "graphforge/error.hpp"

namespace gf = graphforge;

int main(int argc, char** argv) {
  CLI::App app{"graphforge: learn a pair similarity, build a neighbour graph, propagate labels"};
  app.require_subcommand(1);

  std::string config_path;
  gf::cli::Overrides ov;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string rule;
  double epsilon = 0.0;
  std::size_t top_k = 0;

  const std::pair<const char*, const char*> subs[] = {
      {"train", "Train the pair similarity model"},
      {"build", "Build the weighted neighbour graph"},
      {"classify", "Propagate labels over a graph"},
      {"eval", "Run the accuracy protocol and baselines"},
      {"lsh-audit", "Measure strong/weak tie rates of a sketch"},
  };
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Key-value config file")->required();
    sub->add_option("--seed", seed, "Root seed");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sub->add_flag("--all-pairs", ov.all_pairs, "Score every pair instead of sketching");
    sub->add_option("--rule", rule, "product_one_shot | iterative | max_edge");
    sub->add_option("--epsilon", epsilon, "Minimum edge weight");
    sub->add_option("--top-k", top_k, "Per-node edge cap");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--seed")) ov.seed = seed;
  if (active->count("--threads")) ov.threads = threads;
  if (active->count("--rule")) ov.rule = rule;
  if (active->count("--epsilon")) ov.epsilon = epsilon;
  if (active->count("--top-k")) ov.top_k = top_k;

  try {
    const auto sub = gf::cli::parse_subcommand(active->get_name());
    const auto config = gf::cli::RunConfig::load(sub, config_path, ov);
    return gf::cli::run(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "graphforge: error: " << e.what() << '\n';
    return 1;
  }
}
