// citemap: command-line front end for citation-matrix analysis.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "citemap/citemap.hpp"

namespace {

// Raw flag values; only flags the user actually passed override the config file.
struct Flags {
  std::string config, input, format, labels, transform, measure, factors, axis, out_dir;
  double log_base = 0, offset = 0, suppress = 0, threshold = 0, head_threshold = 0, powerlaw_base = 0, grad_tol = 0;
  std::size_t exclude_head = 0;
  std::uint64_t seed = 0;
  int max_outer = 0;
  bool no_rotate = false;
};

struct Registered {
  CLI::App* app;
  std::function<citemap::PipelineConfig()> config;
};

Registered add_subcommand(CLI::App& root, const std::string& name, const std::string& description, Flags& f) {
  auto* sub = root.add_subcommand(name, description);
  auto* config = sub->add_option("--config", f.config, "key = value config file; flags override it");
  auto* input = sub->add_option("--input,-i", f.input, "citation matrix file");
  auto* format = sub->add_option("--format", f.format, "csv, tsv or pajek_net (default: from extension)");
  auto* labels = sub->add_option("--labels", f.labels, "id,name,class_tag label file");
  auto* transform = sub->add_option("--transform", f.transform, "none, log or arcsinh (default log)");
  auto* log_base = sub->add_option("--log-base", f.log_base, "logarithm base (default 10)");
  auto* offset = sub->add_option("--offset", f.offset, "added to every cell before the log (default 1)");
  auto* measure = sub->add_option("--measure", f.measure, "pearson or cosine (default pearson)");
  auto* axis = sub->add_option("--axis", f.axis, "cited (rows, default) or citing (columns)");
  auto* factors = sub->add_option("--factors", f.factors, "kaiser (default) or a fixed factor count");
  auto* no_rotate = sub->add_flag("--no-rotate", f.no_rotate, "skip the varimax rotation");
  auto* suppress = sub->add_option("--suppress", f.suppress, "blank loadings below this magnitude (default 0.1)");
  auto* threshold = sub->add_option("--threshold", f.threshold, "minimum similarity for a map edge (default 0)");
  auto* powerlaw_base = sub->add_option("--powerlaw-base", f.powerlaw_base, "log base of the rank-size fit (default 10)");
  auto* exclude_head = sub->add_option("--exclude-head", f.exclude_head, "ranks left out of the fit (default 0)");
  auto* head_threshold = sub->add_option("--head-threshold", f.head_threshold, "hook residual threshold (default 0.1)");
  auto* seed = sub->add_option("--seed", f.seed, "layout / generator seed (default 1)");
  auto* grad_tol = sub->add_option("--grad-tol", f.grad_tol, "layout gradient tolerance (default 1e-12)");
  auto* max_outer = sub->add_option("--max-outer", f.max_outer, "layout node relaxations (default 100000)");
  auto* out_dir = sub->add_option("--out-dir,-o", f.out_dir, "output directory (default citemap-out)");

  auto build = [=, &f]() {
    citemap::PipelineConfig c;
    if (*config) citemap::apply_config_text(c, citemap::detail::read_file(f.config));
    if (*input) c.input = f.input;
    if (*format) c.format = citemap::format_from_string(f.format);
    if (*labels) c.labels = f.labels;
    if (*transform) c.transform = citemap::transform_from_string(f.transform);
    if (*log_base) c.log_base = f.log_base;
    if (*offset) c.offset = f.offset;
    if (*measure) c.measure = citemap::measure_from_string(f.measure);
    if (*axis) c.axis = f.axis == "citing" ? citemap::Axis::citing : citemap::Axis::cited;
    if (*factors) {
      if (f.factors == "kaiser") {
        c.fixed_factors.reset();
      } else {
        auto k = citemap::text::parse_number(f.factors);
        if (!k || *k < 1) throw citemap::ParameterError("--factors expects 'kaiser' or a positive count");
        c.fixed_factors = static_cast<std::size_t>(*k);
      }
    }
    if (*no_rotate) c.rotate = false;
    if (*suppress) c.suppress = f.suppress;
    if (*threshold) c.threshold = f.threshold;
    if (*powerlaw_base) c.powerlaw_base = f.powerlaw_base;
    if (*exclude_head) c.exclude_head = f.exclude_head;
    if (*head_threshold) c.head_threshold = f.head_threshold;
    if (*seed) c.seed = f.seed;
    if (*grad_tol) c.grad_tol = f.grad_tol;
    if (*max_outer) c.max_outer = f.max_outer;
    if (*out_dir) c.out_dir = f.out_dir;
    return c;
  };
  return {sub, build};
}

void report(const citemap::Report& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  if (!r.text.empty()) std::cout << r.text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citemap: distribution, factor, powerlaw and map analysis of journal citation matrices"};
  app.require_subcommand(1);
  Flags flags;
  auto stats = add_subcommand(app, "stats", "distribution summaries and decile histograms per journal", flags);
  auto classify = add_subcommand(app, "classify", "correlation, scree, Kaiser count and varimax loadings", flags);
  auto powerlaw = add_subcommand(app, "powerlaw", "rank-size powerlaw fits per journal", flags);
  auto map = add_subcommand(app, "map", "Kamada-Kawai maps of the similarity graph", flags);
  auto table5 = add_subcommand(app, "table5", "Pearson and cosine of a two-variable example before and after log", flags);
  auto demo = add_subcommand(app, "demo", "write the seeded synthetic 21-journal demo matrix", flags);
  auto pipeline = add_subcommand(app, "pipeline", "stats, classify, powerlaw, map and table5 in sequence", flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*table5.app) {
      report(citemap::cmd_table5());
    } else if (*demo.app) {
      report(citemap::cmd_demo(demo.config()));
    } else if (*pipeline.app) {
      auto c = pipeline.config();
      if (c.input.empty()) {
        std::cerr << "note: no --input given, running on the synthetic demo matrix\n";
        report(citemap::cmd_demo(c));
        c.input = c.out_dir / "demo.csv";
        c.labels = c.out_dir / "demo_labels.csv";
      }
      const auto m = citemap::load_input(c);
      report(citemap::cmd_stats(c, m));
      report(citemap::cmd_classify(c, m));
      report(citemap::cmd_powerlaw(c, m));
      report(citemap::cmd_map(c, m));
      report(citemap::cmd_table5());
    } else {
      for (const auto& [reg, run] :
           {std::pair{stats, &citemap::cmd_stats}, std::pair{classify, &citemap::cmd_classify},
            std::pair{powerlaw, &citemap::cmd_powerlaw}, std::pair{map, &citemap::cmd_map}}) {
        if (!*reg.app) continue;
        const auto c = reg.config();
        report(run(c, citemap::load_input(c)));
      }
    }
  } catch (const citemap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
