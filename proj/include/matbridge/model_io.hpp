#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "matbridge/errors.hpp"
#include "matbridge/network.hpp"
#include "matbridge/normalize.hpp"
#include "matbridge/schema.hpp"
#include "matbridge/text.hpp"

namespace matbridge {

// Persistence unit: the network plus everything needed to run it on physical
// inputs (schema, normalization) and to say where it came from.
struct ModelBundle {
  Network network;
  NormParams norm_in;
  NormParams norm_out;
  Schema schema;
  std::string train_fingerprint;

  void validate() const {
    network.validate();
    if (norm_in.size() != schema.input_width() || norm_in.size() != network.input_width()) {
      throw CompatibilityError("model bundle: input normalization/schema/network widths differ");
    }
    if (norm_out.size() != schema.output_width() ||
        norm_out.size() != network.output_width()) {
      throw CompatibilityError(
          "model bundle: output normalization/schema/network widths differ");
    }
  }

  // Physical inputs in, physical outputs out.
  std::vector<double> predict(std::span<const double> physical_input) const {
    const auto normed = normalize_apply(physical_input, norm_in);
    const auto out = forward(network, normed);
    return denormalize(out, norm_out);
  }
};

inline constexpr std::string_view kModelFormatMarker = "matbridge-model/1";

// Single text document: marker, fingerprint, schema, per-column normalization,
// then each layer's shape, transfer tag, and row-major full-precision arrays.
inline std::string format_model(const ModelBundle& bundle) {
  bundle.validate();
  std::ostringstream out;
  out << kModelFormatMarker << "\n";
  out << "fingerprint " << bundle.train_fingerprint << "\n";
  for (const ColumnSpec& c : bundle.schema.inputs) {
    out << "schema input " << c.name << " " << c.unit << " " << fmt_double(c.min) << " "
        << fmt_double(c.max) << "\n";
  }
  for (const ColumnSpec& c : bundle.schema.outputs) {
    out << "schema output " << c.name << " " << c.unit << " " << fmt_double(c.min) << " "
        << fmt_double(c.max) << "\n";
  }
  for (const auto& [lo, hi] : bundle.norm_in.ranges) {
    out << "norm input " << fmt_double(lo) << " " << fmt_double(hi) << "\n";
  }
  for (const auto& [lo, hi] : bundle.norm_out.ranges) {
    out << "norm output " << fmt_double(lo) << " " << fmt_double(hi) << "\n";
  }
  out << "network inputs " << bundle.network.input_width() << " layers "
      << bundle.network.layer_count() << "\n";
  for (std::size_t k = 0; k < bundle.network.layer_count(); ++k) {
    const Layer& l = bundle.network.layer(k);
    out << "layer " << k << " neurons " << l.neurons() << " transfer "
        << transfer_name(l.transfer) << "\n";
    out << "weights";
    for (double w : l.weights.data()) out << " " << fmt_double(w);
    out << "\n";
    out << "biases";
    for (double b : l.biases) out << " " << fmt_double(b);
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

inline void save_model(const ModelBundle& bundle, const std::string& path) {
  write_text_file(path, format_model(bundle));
}

namespace detail {

class ModelParser {
 public:
  explicit ModelParser(const std::string& content) : in_(content) {}

  ModelBundle parse() {
    expect_line(std::string(kModelFormatMarker), "format marker");

    std::string line = next_line("fingerprint");
    const std::string fp_tag = "fingerprint";
    if (line.substr(0, fp_tag.size()) != fp_tag) {
      throw ParseError("model file: expected 'fingerprint', got '" + line + "'");
    }
    ModelBundle bundle;
    bundle.train_fingerprint =
        line.size() > fp_tag.size() ? std::string(trim(line.substr(fp_tag.size() + 1))) : "";

    line = next_line("schema");
    while (starts_with(line, "schema ")) {
      auto f = fields(line, 6, "schema line");
      ColumnSpec col{f[2], f[3], parse_double(f[4], "schema " + f[2] + " min"),
                     parse_double(f[5], "schema " + f[2] + " max")};
      if (f[1] == "input") bundle.schema.inputs.push_back(std::move(col));
      else if (f[1] == "output") bundle.schema.outputs.push_back(std::move(col));
      else throw ParseError("model file: schema kind '" + f[1] + "' unknown");
      line = next_line("schema or norm");
    }

    while (starts_with(line, "norm ")) {
      auto f = fields(line, 4, "norm line");
      std::pair<double, double> range{parse_double(f[2], "norm min"),
                                      parse_double(f[3], "norm max")};
      if (range.first > range.second) throw ParseError("model file: norm min exceeds max");
      if (f[1] == "input") bundle.norm_in.ranges.push_back(range);
      else if (f[1] == "output") bundle.norm_out.ranges.push_back(range);
      else throw ParseError("model file: norm kind '" + f[1] + "' unknown");
      line = next_line("norm or network");
    }

    auto f = fields(line, 5, "network line");
    if (f[0] != "network" || f[1] != "inputs" || f[3] != "layers") {
      throw ParseError("model file: expected 'network inputs <n> layers <k>'");
    }
    const std::size_t input_width = parse_count(f[2], "network inputs");
    const std::size_t layer_count = parse_count(f[4], "network layers");

    std::vector<Layer> layers;
    std::size_t prev = input_width;
    for (std::size_t k = 0; k < layer_count; ++k) {
      auto lf = fields(next_line("layer header"), 6, "layer header");
      if (lf[0] != "layer" || lf[2] != "neurons" || lf[4] != "transfer") {
        throw ParseError("model file: expected 'layer <k> neurons <n> transfer <tag>'");
      }
      if (parse_count(lf[1], "layer index") != k) {
        throw ParseError("model file: layer index out of order (expected " +
                         std::to_string(k) + ")");
      }
      Layer layer;
      const std::size_t neurons = parse_count(lf[3], "layer neurons");
      layer.transfer = transfer_from_name(lf[5]);
      layer.weights = Matrix(neurons, prev);
      read_array(next_line("weights"), "weights", "layer " + std::to_string(k) + " weights",
                 layer.weights.data());
      layer.biases.assign(neurons, 0.0);
      read_array(next_line("biases"), "biases", "layer " + std::to_string(k) + " biases",
                 layer.biases);
      layers.push_back(std::move(layer));
      prev = neurons;
    }
    expect_line("end", "end marker");

    try {
      bundle.network = Network(input_width, std::move(layers));
    } catch (const Error& e) {
      throw CompatibilityError(std::string("model file: ") + e.what());
    }
    bundle.validate();
    return bundle;
  }

 private:
  static bool starts_with(const std::string& s, std::string_view prefix) {
    return std::string_view(s).substr(0, prefix.size()) == prefix;
  }

  std::string next_line(const std::string& expected) {
    std::string line;
    while (std::getline(in_, line)) {
      std::string_view text = trim(line);
      if (!text.empty()) return std::string(text);
    }
    throw ParseError("model file: truncated, expected " + expected);
  }

  void expect_line(const std::string& want, const std::string& what) {
    const std::string got = next_line(what);
    if (got != want) {
      throw ParseError("model file: expected " + what + " '" + want + "', got '" + got + "'");
    }
  }

  std::vector<std::string> fields(const std::string& line, std::size_t n,
                                  const std::string& what) {
    auto f = split_fields(line, ' ');
    std::erase(f, std::string());
    if (f.size() != n) {
      throw ParseError("model file: malformed " + what + " ('" + line + "')");
    }
    return f;
  }

  void read_array(const std::string& line, std::string_view tag, const std::string& what,
                  std::vector<double>& dest) {
    auto f = split_fields(line, ' ');
    std::erase(f, std::string());
    if (f.empty() || f[0] != tag) {
      throw ParseError("model file: expected " + what + " line");
    }
    if (f.size() - 1 != dest.size()) {
      throw ParseError("model file: " + what + " has " + std::to_string(f.size() - 1) +
                       " values, expected " + std::to_string(dest.size()));
    }
    for (std::size_t i = 0; i < dest.size(); ++i) {
      dest[i] = parse_double(f[i + 1], what + " entry " + std::to_string(i));
    }
  }

  std::istringstream in_;
};

}  // namespace detail

inline ModelBundle parse_model(const std::string& content) {
  return detail::ModelParser(content).parse();
}

inline ModelBundle load_model(const std::string& path) {
  return parse_model(read_text_file(path));
}

}  // namespace matbridge
