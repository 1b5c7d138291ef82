// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qscd/codec.hpp"
#include "qscd/error.hpp"
#include "qscd/mesh.hpp"
#include "qscd/metrics.hpp"
#include "qscd/training.hpp"

namespace qscd {

enum class DatasetKind { Letters, ImageCsv, ComplexGen, ComplexCsv };

struct ExperimentSpec {
  std::string name = "experiment";
  DatasetKind dataset = DatasetKind::Letters;
  std::string dataset_path;
  ComplexStateParams complex;
  TrainingConfig training;
  std::string output_dir = "out";
  bool emit_plots_data = false;
};

/// Parses flat key=value text. Relative paths resolve against base_dir.
ExperimentSpec parse_spec(std::istream& is, const std::string& base_dir = "");
ExperimentSpec load_spec(const std::string& path);

/// Resolved spec as key=value lines; parse_spec reads it back unchanged.
void write_spec(std::ostream& os, const ExperimentSpec& spec);

/// Inputs and targets (identical for autoencoding), with image metadata when
/// the dataset holds images.
struct Dataset {
  std::vector<StateVector> states;
  std::vector<EncodedSample> encoded;
  std::vector<ImageSample> originals;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool is_image() const noexcept { return !originals.empty(); }
};

Dataset image_dataset(const ImageDataset& images);
Dataset load_dataset(const ExperimentSpec& spec);
/// Reads either CSV format, picked by the number of header fields.
Dataset load_dataset_file(const std::string& path);

struct Evaluation {
  std::vector<StateVector> outputs;
  MetricReport report;
};

Evaluation evaluate_networks(const MeshNetwork& enc, const MeshNetwork& dec,
                             std::size_t d, const Dataset& data);

/// Runs training and writes encoder.net, decoder.net, history.csv,
/// metrics.json, reconstructions.csv and manifest.txt into the output
/// directory.
struct RunSummary {
  std::string output_dir;
  MetricReport report;
  TrainingHistory history;
};

RunSummary run_experiment(const ExperimentSpec& spec,
                          const std::string& spec_text,
                          std::optional<std::size_t> threads = std::nullopt);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string content_hash(const std::string& text);

const char* code_version() noexcept;

/// Process exit code for a library error: 2 config, 3 data, 4 numeric.
int exit_code_for(const Error& e) noexcept;

}  // namespace qscd
