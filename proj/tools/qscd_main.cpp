// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qscd/codec.hpp"
#include "qscd/error.hpp"
#include "qscd/experiment.hpp"
#include "qscd/kernels.hpp"
#include "qscd/mesh.hpp"
#include "qscd/metrics.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw qscd::Error(qscd::ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

template <typename Writer>
void emit(const std::string& out, Writer&& write) {
  if (out.empty() || out == "-") {
    write(std::cout);
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw qscd::Error(qscd::ErrorCode::IoError, "cannot write " + out);
  write(os);
}

int cmd_run(const std::string& spec_path, std::optional<std::size_t> threads) {
  const std::string text = read_file(spec_path);
  std::istringstream is(text);
  const qscd::ExperimentSpec spec = qscd::parse_spec(
      is, std::filesystem::path(spec_path).parent_path().string());
  const qscd::RunSummary s = qscd::run_experiment(spec, text, threads);
  std::cout << "wrote " << s.output_dir << "\n"
            << qscd::to_json(s.report) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum sparse coding and decoding simulator"};
  app.require_subcommand(1);

  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "Cap on worker threads")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Train and evaluate from a spec file");
  std::string spec_path;
  run->add_option("spec", spec_path, "Spec file")->required();
  run->add_option("--threads", threads, "Cap on worker threads")
      ->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-data", "Write a dataset CSV");
  std::string kind;
  qscd::ComplexStateParams cp;
  cp.dim = 8;
  cp.count = 50;
  std::string mode = "uniform";
  std::string gen_out;
  gen->add_option("kind", kind, "letters | complex")
      ->required()
      ->check(CLI::IsMember({"letters", "complex"}));
  gen->add_option("--n", cp.dim, "State dimension");
  gen->add_option("--m", cp.count, "Number of states");
  gen->add_option("--mode", mode, "uniform | subspace")
      ->check(CLI::IsMember({"uniform", "subspace"}));
  gen->add_option("--d", cp.d, "Support dimension for subspace mode");
  gen->add_option("--noise", cp.noise, "Noise weight for subspace mode");
  gen->add_option("--seed", cp.seed, "RNG seed");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  auto* eval = app.add_subcommand("eval", "Evaluate trained networks");
  std::string enc_path, dec_path, data_path, eval_out;
  std::size_t eval_d = 0;
  eval->add_option("--enc", enc_path, "Encoder network")->required();
  eval->add_option("--dec", dec_path, "Decoder network")->required();
  eval->add_option("--data", data_path, "Dataset CSV")->required();
  eval->add_option("--d", eval_d, "Retained modes")->required();
  eval->add_option("--out", eval_out, "metrics.json path (default stdout)");

  auto* version = app.add_subcommand("version", "Print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(spec_path, threads);
    if (*gen) {
      if (kind == "letters") {
        emit(gen_out, [](std::ostream& os) {
          qscd::write_image_csv(os, qscd::letters_dataset());
        });
        return 0;
      }
      cp.mode = mode == "subspace" ? qscd::StateDistribution::SubspaceSupported
                                   : qscd::StateDistribution::UniformRandom;
      qscd::ComplexDataset ds;
      ds.dim = cp.dim;
      ds.seed = std::to_string(cp.seed);
      ds.mode = qscd::mode_token(cp);
      ds.states = qscd::gen_complex_states(cp);
      emit(gen_out, [&](std::ostream& os) { qscd::write_complex_csv(os, ds); });
      return 0;
    }
    if (*eval) {
      const qscd::MeshNetwork enc = qscd::load_network(enc_path);
      const qscd::MeshNetwork dec = qscd::load_network(dec_path);
      const qscd::Dataset data = qscd::load_dataset_file(data_path);
      const qscd::Evaluation ev =
          qscd::evaluate_networks(enc, dec, eval_d, data);
      emit(eval_out, [&](std::ostream& os) {
        os << qscd::to_json(ev.report) << '\n';
      });
      return 0;
    }
    if (*version) {
      std::cout << "qscd " << qscd::code_version() << " ("
                << qscd::kernels::active_table().name << " kernels)\n";
      return 0;
    }
  } catch (const qscd::Error& e) {
    std::cerr << "qscd: " << e.what() << '\n';
    return qscd::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "qscd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
