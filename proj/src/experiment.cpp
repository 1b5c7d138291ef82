// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "qscd/error.hpp"
#include "qscd/kernels.hpp"

namespace qscd {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::ParseError,
              "invalid value '" + value + "' for key '" + key + "'");
}

double to_double(const std::string& key, const std::string& v) {
  // Accept "pi/3"-style fractions of pi for angles.
  if (v.rfind("pi", 0) == 0 || v.find("*pi") != std::string::npos) {
    std::string s = v;
    double mult = 1.0, div = 1.0;
    const auto star = s.find("*pi");
    try {
      if (star != std::string::npos) {
        mult = std::stod(s.substr(0, star));
        s = s.substr(star + 1);
      }
      if (s.rfind("pi", 0) != 0) bad_value(key, v);
      s = s.substr(2);
      if (!s.empty()) {
        if (s[0] != '/') bad_value(key, v);
        div = std::stod(s.substr(1));
      }
    } catch (const std::logic_error&) {
      bad_value(key, v);
    }
    return mult * std::numbers::pi / div;
  }
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::logic_error&) {
  }
  bad_value(key, v);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long x = std::stoull(v, &pos);
      if (pos == v.size()) return static_cast<std::size_t>(x);
    }
  } catch (const std::logic_error&) {
  }
  bad_value(key, v);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

const char* dataset_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::Letters: return "letters";
    case DatasetKind::ImageCsv: return "image-csv";
    case DatasetKind::ComplexGen: return "complex-gen";
    case DatasetKind::ComplexCsv: return "complex-csv";
  }
  return "letters";
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  return os;
}

void write_histograms(const fs::path& p, const MeshNetwork& enc,
                      const MeshNetwork& dec) {
  constexpr std::size_t kBins = 24;
  std::ofstream os = open_out(p);
  os << "network,param,bin_lo,bin_hi,count\n";
  for (const auto& [label, net] :
       {std::pair<const char*, const MeshNetwork*>{"encoder", &enc},
        {"decoder", &dec}}) {
    const MeshNetwork physical = export_physical(*net);
    for (int which = 0; which < 2; ++which) {
      const double hi = which == 0 ? std::numbers::pi / 2 : 2 * std::numbers::pi;
      std::vector<std::size_t> counts(kBins, 0);
      for (std::size_t g = 0; g < physical.gate_count(); ++g) {
        const GateParam& gp = physical.gate(g);
        const double v = which == 0 ? gp.theta : gp.alpha;
        auto bin = static_cast<std::size_t>(v / hi * kBins);
        counts[std::min(bin, kBins - 1)]++;
      }
      for (std::size_t b = 0; b < kBins; ++b) {
        os << label << ',' << (which == 0 ? "theta" : "alpha") << ','
           << fmt(hi * b / kBins) << ',' << fmt(hi * (b + 1) / kBins) << ','
           << counts[b] << '\n';
      }
    }
  }
}

}  // namespace

ExperimentSpec parse_spec(std::istream& is, const std::string& base_dir) {
  ExperimentSpec spec;
  bool complex_seed_set = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    TrainingConfig& t = spec.training;

    if (key == "name") {
      spec.name = v;
    } else if (key == "dataset") {
      if (v == "letters") spec.dataset = DatasetKind::Letters;
      else if (v == "image-csv") spec.dataset = DatasetKind::ImageCsv;
      else if (v == "complex-gen") spec.dataset = DatasetKind::ComplexGen;
      else if (v == "complex-csv") spec.dataset = DatasetKind::ComplexCsv;
      else bad_value(key, v);
    } else if (key == "dataset_path") {
      spec.dataset_path = resolve(base_dir, v);
    } else if (key == "complex_n") {
      spec.complex.dim = to_count(key, v);
    } else if (key == "complex_m") {
      spec.complex.count = to_count(key, v);
    } else if (key == "complex_mode") {
      if (v == "uniform") spec.complex.mode = StateDistribution::UniformRandom;
      else if (v == "subspace") spec.complex.mode = StateDistribution::SubspaceSupported;
      else bad_value(key, v);
    } else if (key == "complex_d") {
      spec.complex.d = to_count(key, v);
    } else if (key == "complex_noise") {
      spec.complex.noise = to_double(key, v);
    } else if (key == "complex_seed") {
      spec.complex.seed = to_count(key, v);
      complex_seed_set = true;
    } else if (key == "l_e") {
      t.enc_layers = to_count(key, v);
    } else if (key == "l_d") {
      t.dec_layers = to_count(key, v);
    } else if (key == "d") {
      t.d = to_count(key, v);
    } else if (key == "eta") {
      t.eta = to_double(key, v);
    } else if (key == "iterations") {
      t.iterations = to_count(key, v);
    } else if (key == "delta") {
      t.delta = to_double(key, v);
    } else if (key == "init_theta") {
      t.init.theta = to_double(key, v);
    } else if (key == "init_alpha") {
      t.init.alpha = to_double(key, v);
    } else if (key == "topology") {
      t.topology = parse_topology(v);
    } else if (key == "decoder_mode") {
      if (v == "trained") t.decoder_mode = DecoderMode::Trained;
      else if (v == "mirror-inverse") t.decoder_mode = DecoderMode::MirrorInverse;
      else bad_value(key, v);
    } else if (key == "loss_kind") {
      if (v == "reconstruction") t.loss_kind = LossKind::Reconstruction;
      else if (v == "inv-probability") t.loss_kind = LossKind::InvProbability;
      else bad_value(key, v);
    } else if (key == "fd_scheme") {
      if (v == "central") t.fd_scheme = FdScheme::Central;
      else if (v == "forward") t.fd_scheme = FdScheme::ForwardPaperLiteral;
      else bad_value(key, v);
    } else if (key == "gradient") {
      if (v == "fd") t.gradient = GradientMethod::FiniteDifference;
      else if (v == "analytic") t.gradient = GradientMethod::Analytic;
      else bad_value(key, v);
    } else if (key == "train_alpha") {
      t.train_alpha = to_bool(key, v);
    } else if (key == "freeze_encoder") {
      t.freeze_encoder = to_bool(key, v);
    } else if (key == "freeze_decoder") {
      t.freeze_decoder = to_bool(key, v);
    } else if (key == "seed") {
      t.seed = to_count(key, v);
    } else if (key == "threads") {
      t.threads = to_count(key, v);
    } else if (key == "record_timing") {
      t.record_timing = to_bool(key, v);
    } else if (key == "output_dir") {
      spec.output_dir = resolve(base_dir, v);
    } else if (key == "emit_plots_data") {
      spec.emit_plots_data = to_bool(key, v);
    } else {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": unknown key '" + key + "'");
    }
  }
  if (!complex_seed_set) spec.complex.seed = spec.training.seed;
  if ((spec.dataset == DatasetKind::ImageCsv ||
       spec.dataset == DatasetKind::ComplexCsv) &&
      spec.dataset_path.empty()) {
    throw Error(ErrorCode::ParseError, "dataset_path is required for CSV datasets");
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read spec " + path);
  return parse_spec(is, fs::path(path).parent_path().string());
}

void write_spec(std::ostream& os, const ExperimentSpec& spec) {
  const TrainingConfig& t = spec.training;
  os << "name=" << spec.name << '\n'
     << "dataset=" << dataset_name(spec.dataset) << '\n';
  if (!spec.dataset_path.empty()) {
    os << "dataset_path=" << fs::absolute(spec.dataset_path).string() << '\n';
  }
  if (spec.dataset == DatasetKind::ComplexGen) {
    os << "complex_n=" << spec.complex.dim << '\n'
       << "complex_m=" << spec.complex.count << '\n'
       << "complex_mode="
       << (spec.complex.mode == StateDistribution::UniformRandom ? "uniform"
                                                                  : "subspace")
       << '\n'
       << "complex_d=" << spec.complex.d << '\n'
       << "complex_noise=" << fmt(spec.complex.noise) << '\n'
       << "complex_seed=" << spec.complex.seed << '\n';
  }
  os << "l_e=" << t.enc_layers << '\n'
     << "l_d=" << t.dec_layers << '\n'
     << "d=" << t.d << '\n'
     << "eta=" << fmt(t.eta) << '\n'
     << "iterations=" << t.iterations << '\n'
     << "delta=" << fmt(t.delta) << '\n'
     << "init_theta=" << fmt(t.init.theta) << '\n'
     << "init_alpha=" << fmt(t.init.alpha) << '\n'
     << "topology=" << to_string(t.topology) << '\n'
     << "decoder_mode="
     << (t.decoder_mode == DecoderMode::Trained ? "trained" : "mirror-inverse")
     << '\n'
     << "loss_kind="
     << (t.loss_kind == LossKind::Reconstruction ? "reconstruction"
                                                 : "inv-probability")
     << '\n'
     << "fd_scheme="
     << (t.fd_scheme == FdScheme::Central ? "central" : "forward") << '\n'
     << "gradient="
     << (t.gradient == GradientMethod::FiniteDifference ? "fd" : "analytic")
     << '\n'
     << "train_alpha=" << (t.train_alpha ? "true" : "false") << '\n'
     << "freeze_encoder=" << (t.freeze_encoder ? "true" : "false") << '\n'
     << "freeze_decoder=" << (t.freeze_decoder ? "true" : "false") << '\n'
     << "seed=" << t.seed << '\n'
     << "threads=" << t.threads << '\n'
     << "record_timing=" << (t.record_timing ? "true" : "false") << '\n'
     << "output_dir=" << fs::absolute(spec.output_dir).string() << '\n'
     << "emit_plots_data=" << (spec.emit_plots_data ? "true" : "false")
     << '\n';
}

Dataset image_dataset(const ImageDataset& images) {
  Dataset ds;
  ds.rows = images.rows;
  ds.cols = images.cols;
  for (const ImageSample& img : images.images) {
    EncodedSample e = image_to_state(img);
    ds.states.push_back(e.state);
    ds.encoded.push_back(std::move(e));
    ds.originals.push_back(img);
  }
  return ds;
}

Dataset load_dataset(const ExperimentSpec& spec) {
  switch (spec.dataset) {
    case DatasetKind::Letters:
      return image_dataset(letters_dataset());
    case DatasetKind::ImageCsv:
      return image_dataset(load_image_csv(spec.dataset_path));
    case DatasetKind::ComplexCsv: {
      Dataset ds;
      ds.states = load_complex_csv(spec.dataset_path).states;
      for (std::size_t m = 0; m < ds.states.size(); ++m) {
        if (!ds.states[m].is_normalized(1e-9)) {
          throw Error(ErrorCode::NotNormalized,
                      spec.dataset_path + ": state " + std::to_string(m) +
                          " is not normalized");
        }
      }
      return ds;
    }
    case DatasetKind::ComplexGen: {
      Dataset ds;
      ds.states = gen_complex_states(spec.complex);
      return ds;
    }
  }
  return {};
}

Dataset load_dataset_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header.size() > 1 ? header.substr(1) : "");
  std::size_t fields = 0;
  for (std::string f; hs >> f;) ++fields;
  ExperimentSpec spec;
  spec.dataset_path = path;
  spec.dataset = fields == 3 ? DatasetKind::ImageCsv : DatasetKind::ComplexCsv;
  return load_dataset(spec);
}

Evaluation evaluate_networks(const MeshNetwork& enc, const MeshNetwork& dec,
                             std::size_t d, const Dataset& data) {
  if (data.states.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "dataset is empty");
  }
  const std::size_t n = data.states.front().dim();
  if (enc.n_modes() != n || dec.n_modes() != n) {
    throw Error(ErrorCode::DimMismatch,
                "networks have " + std::to_string(enc.n_modes()) + "/" +
                    std::to_string(dec.n_modes()) + " modes, dataset has " +
                    std::to_string(n));
  }
  const CompressionChannel ch(n, d);
  Evaluation ev;
  ev.outputs.reserve(data.states.size());
  for (const StateVector& psi : data.states) {
    ev.outputs.push_back(compress_decode(enc, dec, ch, psi));
  }
  ev.report = data.is_image()
                  ? evaluate_images(ev.outputs, data.states, data.encoded,
                                    data.originals)
                  : evaluate_states(ev.outputs, data.states);
  return ev;
}

RunSummary run_experiment(const ExperimentSpec& spec,
                          const std::string& spec_text,
                          std::optional<std::size_t> threads) {
  if (!spec.dataset_path.empty() && !fs::exists(spec.dataset_path)) {
    throw Error(ErrorCode::IoError,
                "dataset file does not exist: " + spec.dataset_path);
  }
  const Dataset data = load_dataset(spec);
  if (data.states.empty()) throw Error(ErrorCode::ShapeMismatch, "dataset is empty");

  TrainingConfig cfg = spec.training;
  if (threads) cfg.threads = *threads;
  cfg.validate(data.states.front().dim());

  const fs::path out(spec.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    throw Error(ErrorCode::IoError,
                "cannot create " + out.string() + ": " + ec.message());
  }

  TrainingResult tr = train(cfg, data.states, data.states);
  const Evaluation ev = evaluate_networks(tr.enc, tr.dec, cfg.d, data);

  save_network((out / "encoder.net").string(), tr.enc);
  save_network((out / "decoder.net").string(), tr.dec);
  {
    std::ofstream os = open_out(out / "history.csv");
    write_history_csv(os, tr.history);
  }
  {
    std::ofstream os = open_out(out / "metrics.json");
    os << to_json(ev.report) << '\n';
  }
  {
    std::ofstream os = open_out(out / "reconstructions.csv");
    if (data.is_image()) {
      ImageDataset recon{data.rows, data.cols, {}};
      for (std::size_t m = 0; m < ev.outputs.size(); ++m) {
        ImageSample img =
            state_to_image(ev.outputs[m].moduli(), data.encoded[m].sigma,
                           data.rows, data.cols);
        img.id = m;
        recon.images.push_back(std::move(img));
      }
      write_reconstruction_csv(os, recon);
    } else {
      ComplexDataset cd;
      cd.dim = data.states.front().dim();
      cd.seed = std::to_string(spec.complex.seed);
      cd.mode = "reconstruction";
      cd.states = ev.outputs;
      write_complex_csv(os, cd);
    }
  }
  {
    std::ofstream os = open_out(out / "manifest.txt");
    os << "# spec_hash=" << content_hash(spec_text) << '\n'
       << "# code_version=" << code_version() << '\n'
       << "# kernels=" << kernels::active_table().name << '\n';
    ExperimentSpec resolved = spec;
    resolved.training = cfg;
    write_spec(os, resolved);
  }
  if (spec.emit_plots_data) {
    std::ofstream os = open_out(out / "loss_curve.csv");
    os << "iter,loss,loss_inv,e_amp,e_pha\n";
    for (const IterationRecord& r : tr.history.records) {
      os << r.iter << ',' << fmt(r.loss) << ',' << fmt(r.loss_inv) << ','
         << fmt(r.e_amp) << ',' << fmt(r.e_pha) << '\n';
    }
    write_histograms(out / "param_hist.csv", tr.enc, tr.dec);
  }

  return {out.string(), ev.report, std::move(tr.history)};
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* code_version() noexcept { return QSCD_VERSION; }

int exit_code_for(const Error& e) noexcept {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidParams:
    case ErrorCode::OddModesForCross:
    case ErrorCode::IndexOutOfRange:
      return 2;
    case ErrorCode::IoError:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ZeroImage:
    case ErrorCode::ZeroVector:
    case ErrorCode::DimMismatch:
    case ErrorCode::NotNormalized:
      return 3;
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::FullyRejected:
      return 4;
  }
  return 1;
}

}  // namespace qscd
