#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fracsob/cli.hpp"
#include "fracsob/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mild solutions and optimal control of fractional Sobolev-type evolution equations"};
  std::string mode;
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  app.add_option("mode", mode, "verify, solve or optimize")->required()->check(CLI::IsMember({"verify", "solve", "optimize"}));
  app.add_option("--config", config_path, "sectioned key = value config file");
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "random seed (overrides [output] seed)")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    fracsob::RunConfig config;
    if (config_path.empty()) {
      if (mode != "verify") {
        std::fprintf(stderr, "error: %s needs --config\n", mode.c_str());
        return 2;
      }
      config = fracsob::default_config();
    } else {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) {
        std::fprintf(stderr, "error: cannot read %s\n", config_path.c_str());
        return 2;
      }
      std::ostringstream text;
      text << in.rdbuf();
      config = fracsob::parse_config(text.str());
    }
    config.mode = fracsob::parse_mode(mode);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    for (auto& [key, value] : config.echo) {
      if (key == "output.dir") value = config.out_dir;
      if (key == "output.seed") value = std::to_string(config.seed);
    }
    const int status = fracsob::run(config);
    std::printf("%s: %s (%s/report.json)\n", mode.c_str(), status == 0 ? "ok" : "failed", config.out_dir.c_str());
    return status;
  } catch (const fracsob::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
