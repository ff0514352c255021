#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "quermass/io.hpp"

using namespace quermass;

int main(int argc, char** argv) {
  CLI::App app{"Quermass-interaction point process toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, snapshots;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file, or a file this program wrote");
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  };

  auto* sample = app.add_subcommand("sample", "run one chain; trace CSV and JSON summary");
  auto* scan = app.add_subcommand("scan", "density gap between the two spin boundaries over an s grid");
  auto* contours = app.add_subcommand("contours", "contour statistics and bound checks on snapshots");
  auto* expand = app.add_subcommand("expand", "cluster-expansion report and rigorous-regime conditions");
  auto* constants = app.add_subcommand("check-constants", "contour constants and the minimal rigorous beta");
  for (auto* s : {sample, scan, contours, expand, constants}) add_common(s);
  contours->add_option("--snapshots", snapshots, "snapshot JSON written by 'sample'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  cli::CommandContext ctx;
  ctx.log = &std::cout;
  try {
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    if (seed) ctx.cfg.seed = *seed;
    if (threads) ctx.cfg.threads = *threads;
    if (!out_dir.empty()) ctx.cfg.out = out_dir;
    ctx.snapshots_override = snapshots;
    validate(ctx.cfg);

    if (*sample) cli::cmd_sample(ctx);
    else if (*scan) cli::cmd_scan(ctx);
    else if (*contours) cli::cmd_contours(ctx);
    else if (*expand) cli::cmd_expand(ctx);
    else if (*constants) cli::cmd_check_constants(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}
