#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fovqa/manifest.hpp"
#include "fovqa/pipeline.hpp"
#include "fovqa/util.hpp"

namespace {

struct Args {
  std::string manifest_path;
  std::string command;
  fovqa::PipelineOptions options;
};

// Flag wins over FOVQA_OUT_DIR, which wins over the manifest's out_dir.
std::string effective_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FOVQA_OUT_DIR"); env && *env) return env;
  return {};
}

int run(const Args& args) {
  try {
    const fovqa::Manifest manifest = fovqa::load_manifest(args.manifest_path);
    fovqa::run_pipeline(manifest, args.command, args.options, std::cout);
    return 0;
  } catch (const fovqa::ValidationError& e) {
    std::cerr << args.command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << args.command << ": " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Foveation-aware quality assessment for omnidirectional images"};
  app.require_subcommand(1);

  Args args;
  std::string out_dir_flag;
  long long seed_flag = -1;

  for (const auto& name : fovqa::pipeline_commands()) {
    CLI::App* sub = app.add_subcommand(name, "");
    sub->add_option("--manifest", args.manifest_path, "Run manifest (JSON)")->required();
    sub->add_option("--seed", seed_flag, "Override the manifest seed");
    sub->add_option("--jobs", args.options.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", out_dir_flag, "Override the output directory");
    if (name == "score" || name == "evaluate" || name == "report")
      sub->add_option("--metrics", args.options.metrics, "Metric ids to include")->delimiter(',');
    if (name == "fit-weights" || name == "evaluate")
      sub->add_option("--group-by", args.options.group_by, "Fit per 'image' or over 'all'");
    sub->callback([&args, name] { args.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  args.options.out_dir = effective_out_dir(out_dir_flag);
  if (seed_flag >= 0) args.options.seed = static_cast<std::uint64_t>(seed_flag);
  return run(args);
}
