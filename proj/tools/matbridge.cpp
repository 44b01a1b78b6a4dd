// Command-line driver for the material-design to product-design pipeline:
// generate surrogate data, train, sweep transfer x thickness grids, evaluate,
// predict, and plot performance curves.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matbridge/matbridge.hpp"

namespace fs = std::filesystem;
using namespace matbridge;

namespace {

struct TrainFlags {
  TrainConfig cfg;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t validation_count = 0;
  double train_frac = 0.65;
  double test_frac = 0.27;
  double validation_frac = 0.08;
  std::uint64_t split_seed = 0;
  bool split_seed_set = false;
  std::string transfer = "tansig";
  std::size_t hidden = 10;
  std::string schema_path;
};

void add_train_options(CLI::App* cmd, TrainFlags& flags) {
  cmd->add_option("--learning-rate", flags.cfg.learning_rate, "gradient step size")
      ->capture_default_str();
  cmd->add_option("--momentum", flags.cfg.momentum, "fraction of the previous update carried")
      ->capture_default_str();
  cmd->add_option("--performance-ratio", flags.cfg.performance_ratio,
                  "error weight gamma in gamma*MSE + (1-gamma)*MSW")
      ->capture_default_str();
  cmd->add_option("--goal", flags.cfg.goal, "stop when performance reaches this value")
      ->capture_default_str();
  cmd->add_option("--max-epochs", flags.cfg.max_epochs, "epoch budget")
      ->capture_default_str();
  cmd->add_option("--min-grad", flags.cfg.min_grad,
                  "stop when the gradient norm falls below this (plateau)")
      ->capture_default_str();
  cmd->add_option("--log-every", flags.cfg.log_every, "history record stride")
      ->capture_default_str();
  cmd->add_option("--seed", flags.cfg.seed, "weight initialization seed")
      ->capture_default_str();
  cmd->add_option("--split-seed", flags.split_seed, "shuffle seed (defaults to --seed)")
      ->each([&flags](const std::string&) { flags.split_seed_set = true; });
  cmd->add_option("--train-count", flags.train_count, "training rows (0: use fractions)")
      ->capture_default_str();
  cmd->add_option("--test-count", flags.test_count, "test rows")->capture_default_str();
  cmd->add_option("--validation-count", flags.validation_count, "validation rows")
      ->capture_default_str();
  cmd->add_option("--train-frac", flags.train_frac, "training fraction")
      ->capture_default_str();
  cmd->add_option("--test-frac", flags.test_frac, "test fraction")->capture_default_str();
  cmd->add_option("--validation-frac", flags.validation_frac, "validation fraction")
      ->capture_default_str();
  cmd->add_option("--transfer", flags.transfer, "hidden layer transfer: tansig|logsig")
      ->capture_default_str();
  cmd->add_option("--hidden", flags.hidden, "hidden layer width")->capture_default_str();
  cmd->add_option("--schema", flags.schema_path, "schema override file");
}

SplitSpec resolve_split(const TrainFlags& flags, std::size_t rows) {
  SplitSpec spec;
  if (flags.train_count || flags.test_count || flags.validation_count) {
    spec.train_count = flags.train_count;
    spec.test_count = flags.test_count;
    spec.validation_count = flags.validation_count;
  } else {
    spec = SplitSpec::from_fractions(flags.train_frac, flags.test_frac,
                                     flags.validation_frac, rows, 0);
  }
  spec.seed = flags.split_seed_set ? flags.split_seed : flags.cfg.seed;
  return spec;
}

Schema resolve_schema(const TrainFlags& flags) {
  return flags.schema_path.empty() ? default_schema() : load_schema(flags.schema_path);
}

std::string train_fingerprint(const TrainFlags& flags, const SplitSpec& split_spec,
                              const std::string& data_path, std::size_t rows,
                              std::size_t filtered_out) {
  std::ostringstream fp;
  fp << "train_fn=traingdm adaption_fn=learnngdm perf_fn=msereg"
     << " learning_rate=" << fmt_double(flags.cfg.learning_rate)
     << " momentum=" << fmt_double(flags.cfg.momentum)
     << " performance_ratio=" << fmt_double(flags.cfg.performance_ratio)
     << " goal=" << fmt_double(flags.cfg.goal) << " max_epochs=" << flags.cfg.max_epochs
     << " min_grad=" << fmt_double(flags.cfg.min_grad)
     << " log_every=" << flags.cfg.log_every << " seed=" << flags.cfg.seed
     << " transfer=" << flags.transfer << " hidden=" << flags.hidden << " split="
     << split_spec.train_count << "/" << split_spec.test_count << "/"
     << split_spec.validation_count << " split_seed=" << split_spec.seed
     << " data=" << data_path << " rows=" << rows << " filtered_out=" << filtered_out;
  return fp.str();
}

struct TrainedCell {
  ModelBundle bundle;
  TrainHistory history;
  SplitResult splits;
};

// Shared pipeline: filter, split, fit normalization on the training split,
// train, bundle.
TrainedCell run_training(const Dataset& raw, const TrainFlags& flags,
                         const std::string& data_path) {
  const FilterResult filtered = filter_outliers(raw);
  const SplitSpec split_spec = resolve_split(flags, filtered.dataset.size());
  TrainedCell cell;
  cell.splits = split(filtered.dataset, split_spec);

  const auto [norm_in, norm_out] = normalize_fit(cell.splits.train);
  const Matrix train_in = normalize_apply(cell.splits.train.inputs, norm_in);
  const Matrix train_out = normalize_apply(cell.splits.train.outputs, norm_out);

  const TransferKind hidden_tf = transfer_from_name(flags.transfer);
  Network net = init_network(
      {raw.schema.input_width(), flags.hidden, raw.schema.output_width()},
      {hidden_tf, TransferKind::purelin}, flags.cfg.seed);

  auto [trained, history] = train(std::move(net), train_in, train_out, flags.cfg);
  cell.history = std::move(history);
  cell.bundle.network = std::move(trained);
  cell.bundle.norm_in = norm_in;
  cell.bundle.norm_out = norm_out;
  cell.bundle.schema = raw.schema;
  cell.bundle.train_fingerprint = train_fingerprint(flags, split_spec, data_path, raw.size(),
                                                    raw.size() - filtered.dataset.size());
  return cell;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_datagen(const SurrogateParams& params, double pressure_bar, const std::string& fluid,
                const std::string& out_path) {
  SurrogateParams p = params;
  if (!fluid.empty()) {
    bool found = false;
    for (const FluidCase& f : standard_fluid_cases()) {
      if (f.name == fluid) {
        p.inlet_pressure = f.inlet_pressure;
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown fluid '" + fluid + "'");
  } else {
    p.inlet_pressure = pressure_bar * 1e5;
  }

  const Dataset ds = generate_dataset(p);
  write_csv(ds, out_path);
  write_text_file(out_path + ".provenance.txt", surrogate_provenance(p) + "\n");
  std::cout << "wrote " << ds.size() << " rows to " << out_path << "\n";
  return 0;
}

int cmd_train(const TrainFlags& flags, const std::string& data_path,
              const std::string& model_path, std::string history_path) {
  const Schema schema = resolve_schema(flags);
  const LoadResult loaded = load_csv(data_path, schema);
  print_warnings(loaded.warnings);

  const TrainedCell cell = run_training(loaded.dataset, flags, data_path);
  save_model(cell.bundle, model_path);
  if (history_path.empty()) history_path = model_path + ".history.csv";
  write_history_csv(cell.history, history_path, cell.bundle.train_fingerprint);

  std::cout << "stop_reason: " << stop_reason_name(cell.history.stop_reason) << "\n";
  std::cout << "epochs: " << cell.history.epochs_run << "\n";
  std::cout << "final_performance: " << fmt_double(cell.history.final_performance) << "\n";
  std::cout << "model: " << model_path << "\n";
  std::cout << "history: " << history_path << "\n";
  return 0;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const std::string& field : split_fields(text, ',')) {
    if (field.empty()) continue;
    values.push_back(parse_double(field, what));
  }
  if (values.empty()) throw ConfigError(what + ": empty list");
  return values;
}

struct SweepRow {
  std::string mode;
  std::string transfer;
  double thickness_mm;
  std::size_t rows = 0;
  double final_performance = 0.0;
  std::size_t epochs = 0;
  std::string stop_reason;
  std::optional<double> test_rms;
  std::string status = "ok";
};

int cmd_sweep(const TrainFlags& base_flags, const std::string& data_path,
              const std::string& out_dir, const std::string& transfers_text,
              const std::string& thicknesses_text, const std::string& mode) {
  if (mode != "per-thickness" && mode != "single") {
    throw ConfigError("sweep --mode must be per-thickness or single");
  }
  const std::vector<std::string> transfers = [&] {
    std::vector<std::string> t;
    for (const std::string& f : split_fields(transfers_text, ',')) {
      if (!f.empty()) t.push_back(f);
    }
    if (t.empty()) throw ConfigError("sweep: empty transfer list");
    return t;
  }();
  const std::vector<double> thicknesses = parse_double_list(thicknesses_text, "thickness");

  const Schema schema = resolve_schema(base_flags);
  const LoadResult loaded = load_csv(data_path, schema);
  print_warnings(loaded.warnings);
  const auto thickness_col = schema.find_input("thickness");
  if (!thickness_col) throw SchemaError("sweep: schema has no 'thickness' input column");

  fs::create_directories(out_dir);
  std::vector<SweepRow> rows;

  auto cell_tag = [&](const std::string& transfer, double t_mm) {
    return "cell_" + transfer + "_" + fmt_double(t_mm);
  };

  for (const std::string& transfer : transfers) {
    // single mode trains once per transfer on the full dataset
    std::optional<TrainedCell> shared;
    std::string shared_error;
    if (mode == "single") {
      TrainFlags flags = base_flags;
      flags.transfer = transfer;
      try {
        shared = run_training(loaded.dataset, flags, data_path);
      } catch (const Error& e) {
        shared_error = e.what();
      }
    }

    for (double t_mm : thicknesses) {
      SweepRow row;
      row.mode = mode;
      row.transfer = transfer;
      row.thickness_mm = t_mm;
      try {
        if (mode == "per-thickness") {
          std::vector<std::size_t> keep;
          for (std::size_t r = 0; r < loaded.dataset.size(); ++r) {
            if (loaded.dataset.inputs(r, *thickness_col) == t_mm) keep.push_back(r);
          }
          if (keep.empty()) throw ConfigError("no rows with thickness " + fmt_double(t_mm));
          const Dataset cell_data = loaded.dataset.rows(keep);
          row.rows = cell_data.size();

          TrainFlags flags = base_flags;
          flags.transfer = transfer;
          const TrainedCell cell = run_training(cell_data, flags, data_path);
          row.final_performance = cell.history.final_performance;
          row.epochs = cell.history.epochs_run;
          row.stop_reason = std::string(stop_reason_name(cell.history.stop_reason));
          if (cell.splits.test.size() > 0) {
            row.test_rms = evaluate(cell.bundle, cell.splits.test).aggregate.rms;
          }
          const std::string tag = cell_tag(transfer, t_mm);
          save_model(cell.bundle, (fs::path(out_dir) / (tag + ".model.txt")).string());
          write_history_csv(cell.history,
                            (fs::path(out_dir) / (tag + ".history.csv")).string(),
                            cell.bundle.train_fingerprint);
        } else {
          if (!shared) throw ConfigError(shared_error);
          row.final_performance = shared->history.final_performance;
          row.epochs = shared->history.epochs_run;
          row.stop_reason = std::string(stop_reason_name(shared->history.stop_reason));

          std::vector<std::size_t> keep;
          for (std::size_t r = 0; r < shared->splits.test.size(); ++r) {
            if (shared->splits.test.inputs(r, *thickness_col) == t_mm) keep.push_back(r);
          }
          row.rows = keep.size();
          if (!keep.empty()) {
            row.test_rms =
                evaluate(shared->bundle, shared->splits.test.rows(keep)).aggregate.rms;
          }
          const std::string tag = cell_tag(transfer, t_mm);
          save_model(shared->bundle, (fs::path(out_dir) / (tag + ".model.txt")).string());
          write_history_csv(shared->history,
                            (fs::path(out_dir) / (tag + ".history.csv")).string(),
                            shared->bundle.train_fingerprint);
        }
      } catch (const Error& e) {
        row.status = e.what();
      }
      rows.push_back(std::move(row));
    }
  }

  std::ostringstream table;
  table << "# sweep data=" << data_path << " mode=" << mode << " transfers=" << transfers_text
        << " thicknesses=" << thicknesses_text << " seed=" << base_flags.cfg.seed << "\n";
  table << "mode,transfer,thickness_mm,rows,final_performance,epochs,stop_reason,test_rms,"
           "status\n";
  for (const SweepRow& row : rows) {
    table << row.mode << "," << row.transfer << "," << fmt_double(row.thickness_mm) << ","
          << row.rows << "," << fmt_double(row.final_performance) << "," << row.epochs << ","
          << row.stop_reason << "," << (row.test_rms ? fmt_double(*row.test_rms) : "") << ","
          << row.status << "\n";
  }
  const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();
  write_text_file(summary_path, table.str());
  std::cout << table.str();
  std::cout << "summary: " << summary_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& out_dir) {
  const ModelBundle bundle = load_model(model_path);
  const LoadResult loaded = load_csv(data_path, bundle.schema);
  print_warnings(loaded.warnings);

  const EvalReport report = evaluate(bundle, loaded.dataset);
  fs::create_directories(out_dir);
  const std::string provenance = "model=" + model_path + " data=" + data_path;
  write_text_file((fs::path(out_dir) / "report.csv").string(),
                  format_report_csv(report, provenance));
  write_text_file((fs::path(out_dir) / "predictions.csv").string(),
                  format_predictions_csv(loaded.dataset, report.predictions, provenance));
  std::cout << format_report_table(report);
  std::cout << "report: " << (fs::path(out_dir) / "report.csv").string() << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input_text,
                const std::string& data_path, const std::string& out_path) {
  const ModelBundle bundle = load_model(model_path);

  Matrix inputs;
  if (!input_text.empty()) {
    const std::vector<double> values = parse_double_list(input_text, "--input");
    if (values.size() != bundle.schema.input_width()) {
      throw ConfigError("--input needs " + std::to_string(bundle.schema.input_width()) +
                        " comma-separated values, got " + std::to_string(values.size()));
    }
    inputs = Matrix(1, values.size());
    for (std::size_t c = 0; c < values.size(); ++c) inputs(0, c) = values[c];
  } else if (!data_path.empty()) {
    inputs = load_inputs_csv(data_path, bundle.schema);
  } else {
    throw ConfigError("predict needs --input or --data");
  }

  std::ostringstream out;
  for (std::size_t c = 0; c < bundle.schema.output_width(); ++c) {
    if (c) out << ",";
    out << bundle.schema.outputs[c].name;
  }
  out << "\n";
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const auto prediction = bundle.predict(inputs.row(r));
    for (std::size_t c = 0; c < prediction.size(); ++c) {
      if (c) out << ",";
      out << fmt_double(prediction[c]);
    }
    out << "\n";
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    write_text_file(out_path, out.str());
    std::cout << "wrote " << inputs.rows() << " predictions to " << out_path << "\n";
  }
  return 0;
}

int cmd_plot(const std::string& history_path, const std::string& out_path,
             std::size_t max_points) {
  const TrainHistory history = load_history_csv(history_path);
  if (history.records.empty()) {
    throw ConfigError("plot: history '" + history_path + "' has no records");
  }
  const std::string provenance = "history=" + history_path;
  write_text_file(out_path, render_history_svg(history, provenance));
  const std::string csv_path = out_path + ".downsampled.csv";
  write_text_file(csv_path, "# " + provenance + "\n" +
                                format_downsampled_csv(history, max_points));
  std::cout << "curve: " << out_path << "\n";
  std::cout << "downsampled: " << csv_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matbridge: feed-forward regression from alloy composition and mechanical\n"
               "properties to valve product behavior, with a physics surrogate data source"};
  app.require_subcommand(1);

  // datagen
  auto* datagen = app.add_subcommand("datagen", "generate a surrogate dataset CSV");
  datagen->set_config("--config");
  SurrogateParams sur;
  double pressure_bar = 350.0;
  std::string fluid;
  std::string datagen_out;
  datagen->add_option("--count", sur.sample_count, "number of rows")->capture_default_str();
  datagen->add_option("--seed", sur.seed, "generator seed")->capture_default_str();
  datagen->add_option("--noise-sigma", sur.noise_sigma, "relative output noise")
      ->capture_default_str();
  datagen->add_option("--pressure-bar", pressure_bar, "inlet pressure for every row (bar)")
      ->capture_default_str();
  datagen->add_flag("--sample-pressure", sur.sample_pressure,
                    "sample pressure per row over the case span instead");
  datagen->add_option("--fluid", fluid, "preset pressure from a fluid case: water|lubricant|diesel");
  std::string thickness_text = "15,17,19,21";
  datagen->add_option("--thickness-grid", thickness_text, "thickness values (mm)")
      ->capture_default_str();
  datagen->add_option("--out", datagen_out, "output CSV path")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "train a network on a dataset CSV");
  train_cmd->set_config("--config");
  TrainFlags train_flags;
  std::string train_data, train_model, train_history;
  train_cmd->add_option("--data", train_data, "dataset CSV")->required();
  train_cmd->add_option("--out", train_model, "model file to write")->required();
  train_cmd->add_option("--history", train_history, "history CSV to write");
  add_train_options(train_cmd, train_flags);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "train the transfer x thickness grid");
  sweep_cmd->set_config("--config");
  TrainFlags sweep_flags;
  std::string sweep_data, sweep_out_dir;
  std::string sweep_transfers = "tansig,logsig";
  std::string sweep_thicknesses = "15,17,19,21";
  std::string sweep_mode = "per-thickness";
  sweep_cmd->add_option("--data", sweep_data, "dataset CSV")->required();
  sweep_cmd->add_option("--out-dir", sweep_out_dir, "directory for cell outputs")->required();
  sweep_cmd->add_option("--transfers", sweep_transfers, "comma list of hidden transfers")
      ->capture_default_str();
  sweep_cmd->add_option("--thicknesses", sweep_thicknesses, "comma list of thicknesses (mm)")
      ->capture_default_str();
  sweep_cmd->add_option("--mode", sweep_mode, "per-thickness | single")
      ->capture_default_str();
  add_train_options(sweep_cmd, sweep_flags);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a model against a labeled dataset");
  eval_cmd->set_config("--config");
  std::string eval_model, eval_data, eval_out_dir = ".";
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--data", eval_data, "dataset CSV")->required();
  eval_cmd->add_option("--out-dir", eval_out_dir, "directory for report files")
      ->capture_default_str();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "run a model on new inputs");
  predict_cmd->set_config("--config");
  std::string predict_model, predict_input, predict_data, predict_out;
  predict_cmd->add_option("--model", predict_model, "model file")->required();
  predict_cmd->add_option("--input", predict_input, "one comma-separated input row");
  predict_cmd->add_option("--data", predict_data, "CSV of input rows");
  predict_cmd->add_option("--out", predict_out, "write predictions here instead of stdout");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "render a history CSV as an SVG curve");
  plot_cmd->set_config("--config");
  std::string plot_history, plot_out;
  std::size_t plot_points = 200;
  plot_cmd->add_option("--history", plot_history, "history CSV")->required();
  plot_cmd->add_option("--out", plot_out, "SVG path to write")->required();
  plot_cmd->add_option("--max-points", plot_points, "downsampled CSV size")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (datagen->parsed()) {
      sur.thickness_grid_mm = parse_double_list(thickness_text, "--thickness-grid");
      return cmd_datagen(sur, pressure_bar, fluid, datagen_out);
    }
    if (train_cmd->parsed()) {
      return cmd_train(train_flags, train_data, train_model, train_history);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_flags, sweep_data, sweep_out_dir, sweep_transfers,
                       sweep_thicknesses, sweep_mode);
    }
    if (eval_cmd->parsed()) return cmd_evaluate(eval_model, eval_data, eval_out_dir);
    if (predict_cmd->parsed()) {
      return cmd_predict(predict_model, predict_input, predict_data, predict_out);
    }
    if (plot_cmd->parsed()) return cmd_plot(plot_history, plot_out, plot_points);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
