#include "gazesim/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"

#include "gazesim/analysis.hpp"
#include "gazesim/cluster.hpp"
#include "gazesim/csv.hpp"
#include "gazesim/dataset_io.hpp"
#include "gazesim/error.hpp"
#include "gazesim/keyvalue.hpp"
#include "gazesim/service.hpp"
#include "gazesim/simmatrix.hpp"

namespace fs = std::filesystem;

namespace gazesim::cli {

namespace {

struct Overrides {
  std::string config;
  std::optional<double> window_s;
  std::optional<double> fps;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<std::string> scales;
  std::optional<long long> seed;
  std::optional<int> port;
  std::optional<std::string> out;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration (key = value file)");
  cmd->add_option("--window-s", o.window_s, "Analysis window length in seconds");
  cmd->add_option("--fps", o.fps, "Target frame rate after downsampling");
  cmd->add_option("--lambda", o.lambda, "TWED deletion penalty");
  cmd->add_option("--gamma", o.gamma, "TWED stiffness");
  cmd->add_option("--scales", o.scales, "Comma-separated modularity scales");
  cmd->add_option("--seed", o.seed, "Seed of the community-detection visiting order");
  cmd->add_option("--port", o.port, "HTTP port for serve");
  cmd->add_option("--out", o.out, "Output directory");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.window_s) c.window_s = *o.window_s;
  if (o.fps) c.preprocess.target_fps = *o.fps;
  if (o.lambda) c.twed.lambda = *o.lambda;
  if (o.gamma) c.twed.gamma = *o.gamma;
  if (o.scales) c.scales = parse_number_list(*o.scales);
  if (o.seed) {
    if (*o.seed < 0) throw Error(Errc::InvalidArgument, "seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(*o.seed);
  }
  if (o.port) c.port = *o.port;
  if (o.out) c.out_dir = *o.out;
  c.validate();
  return c;
}

std::string window_tag(const WindowSpec& w) {
  return "s" + csv::format_double(w.start_s) + "_len" + csv::format_double(w.length_s);
}

MatrixFileMeta file_meta(const CohortDataset& cohort) { return {cohort.video_id, cohort.frame_rate_fps}; }

void write_matrix(const fs::path& dir, const SimilarityMatrix& sim, const MatrixFileMeta& meta, std::string* csv_name) {
  const std::string base = matrix_basename(sim.window, sim.params);
  write_text_file(dir / (base + ".csv"), similarity_to_csv(sim));
  write_text_file(dir / (base + ".meta"), similarity_metadata(sim, meta));
  if (csv_name) *csv_name = base + ".csv";
}

}  // namespace

void preprocess(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const RawInputs inputs = load_raw_inputs(config);
  for (const auto& w : inputs.warnings) err << "warning: " << w << "\n";

  auto result = preprocess_cohort(inputs.viewers, inputs.duration_ms, config.preprocess);
  auto& cohort = result.cohort;
  cohort.video_id = config.video_id;
  cohort.screen = inputs.screen;
  for (const auto& [id, rec] : inputs.eeg) {
    if (cohort.viewers.contains(id)) cohort.eeg.emplace(id, rec);
  }
  cohort.answers = inputs.answers;

  const fs::path dir = config.dataset_dir();
  write_preprocessed(dir, cohort, result.excluded);

  const auto windows = tile_windows(cohort, config.window_s);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto files = window_value_files(cohort, windows[k]);
    std::ostringstream name;
    name << "w" << std::setw(3) << std::setfill('0') << k << "_" << window_tag(windows[k]);
    const fs::path wdir = dir / "windows" / name.str();
    write_text_file(wdir / "x.csv", files.x_csv);
    write_text_file(wdir / "y.csv", files.y_csv);
    write_text_file(wdir / "window.csv", files.consolidated_csv);
  }

  for (const auto& e : result.excluded) {
    out << "excluded " << e.viewer_id << " (missing " << csv::format_double(e.missing_ratio) << ")\n";
  }
  out << "preprocessed " << cohort.viewers.size() << " viewers, " << cohort.frame_count() << " frames at "
      << csv::format_double(cohort.frame_rate_fps) << " fps, " << windows.size() << " windows -> " << dir.string()
      << "\n";
}

void similarity(const RunConfig& config, std::ostream& out) {
  const auto cohort = load_preprocessed(config.dataset_dir());
  const auto windows = tile_windows(cohort, config.window_s);
  if (windows.empty()) throw Error(Errc::InvalidArgument, "data is shorter than one window");
  const auto matrices = compute_window_matrices(cohort, windows, config.twed, config.normalization);

  const fs::path dir = config.out_dir / "similarity";
  std::string index = "start_s,length_s,matrix\n";
  for (const auto& sim : matrices) {
    std::string name;
    write_matrix(dir, sim, file_meta(cohort), &name);
    index += csv::format_double(sim.window.start_s) + "," + csv::format_double(sim.window.length_s) + "," + name + "\n";
  }
  write_text_file(dir / "index.csv", index);
  out << "wrote " << matrices.size() << " similarity matrices -> " << dir.string() << "\n";
}

void cluster(const RunConfig& config, std::ostream& out) {
  const fs::path sim_dir = config.out_dir / "similarity";
  const fs::path dir = config.out_dir / "clusters";
  const auto index = read_text_file(sim_dir / "index.csv");

  std::string summary = "matrix,scale,communities,Q\n";
  std::size_t count = 0;
  bool header = true;
  for (const auto line : csv::lines(index)) {
    if (csv::is_blank(line)) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto row = csv::split_line(line, ',');
    if (row.size() != 3) throw Error(Errc::MalformedRow, "similarity/index.csv: " + std::string(line));
    const fs::path matrix = sim_dir / row[2];
    const auto sim = similarity_from_files(read_text_file(matrix),
                                           read_text_file(fs::path(matrix).replace_extension(".meta")));
    const auto graph = build_graph(sim, config.min_weight);
    const auto sweep = detect_communities(graph, config.scales, config.seed);

    const std::string base = fs::path(row[2]).stem().string();
    write_text_file(dir / (base + "_partition.csv"), partition_csv(graph, sweep));
    for (const auto& part : sweep.partitions) {
      const auto tables = export_gephi(graph, part);
      const std::string tag = base + "_p" + csv::format_double(part.scale);
      write_text_file(dir / "gephi" / (tag + "_nodes.csv"), tables.nodes_csv);
      write_text_file(dir / "gephi" / (base + "_edges.csv"), tables.edges_csv);
      summary += row[2] + "," + csv::format_double(part.scale) + "," + std::to_string(part.community_count()) + "," +
                 csv::format_double(part.q_value) + "\n";
    }
    ++count;
  }
  write_text_file(dir / "index.csv", summary);
  out << "clustered " << count << " matrices at " << config.scales.size() << " scale(s) -> " << dir.string() << "\n";
}

void sweep(const RunConfig& config, std::ostream& out) {
  const auto cohort = load_preprocessed(config.dataset_dir());
  const WindowSpec window{config.sweep_start_s, config.sweep_length_s};
  const auto& lambdas = config.sweep_lambdas.empty() ? kDefaultSweepValues : config.sweep_lambdas;
  const auto& gammas = config.sweep_gammas.empty() ? kDefaultSweepValues : config.sweep_gammas;
  const auto grid = parameter_sweep(cohort, window, lambdas, gammas);

  const fs::path dir = config.out_dir / "sweep";
  std::string manifest = "lambda,gamma,path\n";
  for (const double l : lambdas) {
    for (const double g : gammas) {
      std::string name;
      write_matrix(dir, grid.at(l, g), file_meta(cohort), &name);
      manifest += csv::format_double(l) + "," + csv::format_double(g) + "," + name + "\n";
    }
  }
  write_text_file(dir / "manifest.csv", manifest);
  for (const auto& [a, b] : config.trail_pairs) {
    write_text_file(dir / ("trail_" + a + "_" + b + "_" + window_tag(window) + ".csv"),
                    trail_csv(trail_plot_data(cohort, a, b, window)));
  }
  out << "swept " << grid.results.size() << " (lambda, gamma) cells -> " << dir.string() << "\n";
}

void correlate(const RunConfig& config, std::ostream& out) {
  if (config.questions.empty()) throw Error(Errc::InvalidArgument, "no questions selected (config key 'questions')");
  const auto cohort = load_preprocessed(config.dataset_dir());
  std::optional<AnswerSheet> sheet = cohort.answers;
  if (!config.answers_file.empty()) sheet = parse_answer_sheet(read_text_file(config.answers_file));
  if (!sheet) throw Error(Errc::InvalidArgument, "no answer sheet available");

  const WindowSpec window{config.correlate_start_s, config.correlate_length_s.value_or(config.window_s)};
  const auto sim = compute_window_matrices(cohort, std::span<const WindowSpec>(&window, 1), config.twed).front();
  const auto penalty = select_viewers(answer_penalty_matrix(*sheet, config.questions), sim.viewer_ids);
  const auto corr = correlate(penalty, sim);

  const fs::path dir = config.out_dir / "correlate";
  write_text_file(dir / "scatter.csv", scatter_csv(corr));
  KeyValueFile summary;
  summary.set("samples", std::to_string(corr.samples.size()));
  summary.set("pearson_r", corr.pearson_r ? csv::format_double(*corr.pearson_r) : "NA");
  summary.set("questions", csv::join(config.questions));
  summary.set("window_start_s", csv::format_double(window.start_s));
  summary.set("window_length_s", csv::format_double(window.length_s));
  summary.set("lambda", csv::format_double(config.twed.lambda));
  summary.set("gamma", csv::format_double(config.twed.gamma));
  write_text_file(dir / "summary.meta", summary.serialize());
  out << corr.samples.size() << " viewer pairs, pearson r = "
      << (corr.pearson_r ? csv::format_double(*corr.pearson_r) : std::string("NA")) << "\n";
}

void serve(const RunConfig& config, std::ostream& out) {
  GazeService service(load_preprocessed(config.dataset_dir()), {config.twed, config.cache_capacity});
  HttpServer server(service, config.ui_dir);
  const int port = server.bind("0.0.0.0", config.port);
  out << "serving " << service.cohort().viewers.size() << " viewers on http://0.0.0.0:" << port << std::endl;
  server.listen();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eye-movement similarity toolkit", "gazesim"};
  app.require_subcommand(1);
  Overrides o;
  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"preprocess", "Rasterize, smooth, exclude, fill and downsample fixation exports"},
      {"similarity", "Per-window TWED similarity matrices"},
      {"cluster", "Multi-scale community detection over the similarity matrices"},
      {"sweep", "Lambda/gamma grid over one window, plus trail plot data"},
      {"correlate", "Answer-penalty vs similarity scatter and Pearson r"},
      {"serve", "Read-only HTTP service for the explorer UI"},
  };
  for (const auto& c : commands) add_common_flags(app.add_subcommand(c.name, c.help), o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    const RunConfig config = resolve_config(o);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "preprocess") preprocess(config, out, err);
    if (name == "similarity") similarity(config, out);
    if (name == "cluster") cluster(config, out);
    if (name == "sweep") sweep(config, out);
    if (name == "correlate") correlate(config, out);
    if (name == "serve") serve(config, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::Io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace gazesim::cli
