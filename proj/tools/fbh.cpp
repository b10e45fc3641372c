#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "scenario.hpp"

namespace {

int thread_budget() {
  if (const char* env = std::getenv("FBH_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? (int)hc : 2;
}

/// Runs the scenario files on a worker pool; the worst exit code wins.
int run_all(const std::vector<std::string>& files, int threads) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{fbhcli::kOk};
  std::mutex io;
  auto update = [&](int code) {
    int cur = worst.load();
    while (code > cur && !worst.compare_exchange_weak(cur, code)) {
    }
  };
  auto work = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= files.size()) return;
      int code;
      std::string note;
      try {
        fbhcli::Config cfg = fbhcli::parse_config(files[k]);
        // the per-scenario inner pool shares the global budget
        code = fbhcli::run_scenario(cfg, std::max(1, threads / (int)files.size()));
      } catch (const fbhcli::ConfigError& e) {
        code = fbhcli::kValidationError;
        note = e.what();
      } catch (const std::exception& e) {
        code = fbhcli::kValidationError;
        note = e.what();
      }
      update(code);
      std::lock_guard<std::mutex> lk(io);
      std::cout << files[k] << ": exit " << code;
      if (!note.empty()) std::cout << " (" << note << ")";
      std::cout << "\n";
    }
  };
  int nt = std::max(1, std::min<int>(threads, (int)files.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-boundary harmonic map workbench"};
  app.require_subcommand(1);

  std::vector<std::string> run_files;
  CLI::App* run = app.add_subcommand("run", "execute scenario config files");
  run->add_option("configs", run_files, "scenario config files")->required();

  std::string const_file;
  CLI::App* consts = app.add_subcommand("constants", "measure the working constants");
  consts->add_option("config", const_file, "constants scenario config")->required();

  std::string plot_dir;
  CLI::App* plot = app.add_subcommand("plot", "render SVG plots for a finished run");
  plot->add_option("run_dir", plot_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  int threads = thread_budget();
  if (run->parsed()) return run_all(run_files, threads);
  if (consts->parsed()) {
    try {
      fbhcli::Config cfg = fbhcli::parse_config(const_file);
      if (cfg.get("kind") != "constants") {
        std::cerr << "fbh constants: config kind must be 'constants'\n";
        return fbhcli::kValidationError;
      }
      return fbhcli::run_scenario(cfg, threads);
    } catch (const std::exception& e) {
      std::cerr << "fbh constants: " << e.what() << "\n";
      return fbhcli::kValidationError;
    }
  }
  if (plot->parsed()) return fbhcli::emit_plots(plot_dir);
  return fbhcli::kOk;
}
