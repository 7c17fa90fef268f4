#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bergman/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Bergman/Besov space experiments"};
  std::string config_path;
  std::string out_dir = "out";
  unsigned workers = 1;
  bool reproducible = false;
  bool no_plot = false;
  app.add_option("--config", config_path, "JSON config file, or - for stdin")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "maximum worker threads")->check(CLI::Range(1u, 1024u));
  app.add_flag("--reproducible", reproducible, "omit timestamp and worker count from the report");
  app.add_flag("--no-plot", no_plot, "skip plot.svg");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string text;
  std::filesystem::path base = ".";
  if (config_path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << '\n';
      return 2;
    }
    text.assign(std::istreambuf_iterator<char>(in), {});
    base = std::filesystem::path(config_path).parent_path();
    if (base.empty()) base = ".";
  }
  bergman::cli::RunOptions opt;
  opt.workers = workers;
  opt.reproducible = reproducible;
  opt.plot = !no_plot;
  return bergman::cli::run(text, base, out_dir, opt);
}
