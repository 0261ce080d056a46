#include "hyperviz/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hyperviz/error.hpp"
#include "hyperviz/logging.hpp"
#include "hyperviz/mapping.hpp"
#include "hyperviz/sa_metrics.hpp"
#include "hyperviz/scene_io.hpp"
#include "hyperviz/server.hpp"

namespace hyperviz::cli {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ParseOptions parse_options(const std::string& delimiter, const std::vector<std::string>& missing) {
  if (delimiter.size() != 1) throw Error(ErrorCode::InvalidArgument, "delimiter must be one character");
  ParseOptions options;
  options.delimiter = delimiter[0];
  if (!missing.empty()) options.missing_tokens = missing;
  return options;
}

}  // namespace

void cmd_ingest(const std::filesystem::path& file, const ParseOptions& options, std::ostream& out) {
  const Catalog catalog = load_catalog(file, options);
  for (const Column& column : catalog.columns()) {
    std::string line = fmt::format("{} kind={} present={} missing={}", column.name(), to_string(column.kind()),
                                   column.present_count(), column.missing_count());
    if (column.present_count() > 0) {
      const ColumnStats stats = column_stats(column);
      if (column.is_numeric()) {
        line += fmt::format(" min={} max={} mean={}", stats.min, stats.max, stats.mean);
      } else {
        line += fmt::format(" categories={}", stats.distinct_categories.size());
      }
    }
    out << line << '\n';
  }
}

void cmd_scene(const std::filesystem::path& catalog_path, const std::filesystem::path& mapping_path,
               const std::filesystem::path& output, const ParseOptions& options, std::ostream& out) {
  const Catalog catalog = load_catalog(catalog_path, options);
  nlohmann::json mapping_json = nlohmann::json::parse(read_text(mapping_path), nullptr, false);
  if (mapping_json.is_discarded()) {
    throw Error(ErrorCode::BadPayload, "mapping file '" + mapping_path.string() + "' is not valid JSON");
  }
  const ChannelMapping mapping = mapping_from_json(mapping_json);
  const Scene scene = build_scene(catalog, mapping);
  const auto columns = catalog.column_names();
  write_hvsc_file(output, scene, mapping, columns);
  out << fmt::format("points={} excluded_rows={} bytes={}\n", scene.count(), scene.excluded_rows,
                     std::filesystem::file_size(output));
}

void cmd_score(const std::filesystem::path& truth, const std::filesystem::path& drawn, bool align,
               std::ostream& out) {
  const auto score = sa::score_map(sa::load_landmarks_csv(truth), sa::load_landmarks_csv(drawn), align);
  out << sa::to_json(score).dump(2) << '\n';
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hyperviz: catalog ingest, scene files, collaborative sessions and map scoring"};
  app.require_subcommand(1);

  std::string delimiter = ",";
  std::vector<std::string> missing;
  auto add_csv_flags = [&](CLI::App* cmd) {
    cmd->add_option("--delimiter", delimiter, "field separator")->capture_default_str();
    cmd->add_option("--missing", missing, "tokens read as missing (default: empty, NA, NaN, null)");
  };

  std::filesystem::path input;
  auto* ingest = app.add_subcommand("ingest", "summarize a CSV catalog");
  ingest->add_option("file", input)->required();
  add_csv_flags(ingest);

  std::filesystem::path mapping_path, output;
  auto* scene = app.add_subcommand("scene", "write the HVSC scene for a mapping");
  scene->add_option("catalog", input)->required();
  scene->add_option("--mapping", mapping_path, "JSON channel mapping")->required();
  scene->add_option("-o,--output", output, "HVSC file to write")->required();
  add_csv_flags(scene);

  serve::ServeConfig config;
  std::string bind = "127.0.0.1:8080";
  std::string link_template;
  auto* serve_cmd = app.add_subcommand("serve", "host collaborative rooms over HTTP and WebSocket");
  serve_cmd->add_option("--catalog", input)->required();
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
  serve_cmd->add_option("--link-template", link_template, "URL with {column} placeholders");
  serve_cmd->add_option("--budget", config.budget, "points per scene response")->capture_default_str();
  serve_cmd->add_option("--viewpoint-rate", config.viewpoint_rate, "viewpoint broadcasts per second per room")
      ->capture_default_str();
  serve_cmd->add_option("--assets", config.assets, "directory served instead of the built-in page");
  serve_cmd->add_option("--threads", config.io_threads, "I/O threads")->capture_default_str();
  add_csv_flags(serve_cmd);

  std::filesystem::path truth, drawn;
  bool align = false;
  auto* score = app.add_subcommand("score", "score a drawn landmark map against the truth");
  score->add_option("truth", truth)->required();
  score->add_option("drawn", drawn)->required();
  score->add_flag("--align", align, "apply the best global rotation first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    const ParseOptions options = parse_options(delimiter, missing);
    if (*ingest) {
      cmd_ingest(input, options, out);
    } else if (*scene) {
      cmd_scene(input, mapping_path, output, options, out);
    } else if (*score) {
      cmd_score(truth, drawn, align, out);
    } else if (*serve_cmd) {
      auto log = make_logger();
      std::tie(config.address, config.port) = serve::parse_bind(bind);
      if (!link_template.empty()) config.link_template = link_template;
      Catalog catalog = load_catalog(input, options);
      log->info("loaded {} ({} rows, {} columns)", input.string(), catalog.n_rows(), catalog.n_columns());
      serve::Server server(config, std::move(catalog), log);
      try {
        server.start();
      } catch (const std::exception& e) {
        err << "hyperviz: cannot listen on " << bind << ": " << e.what() << '\n';
        return 1;
      }
      server.stop_on_signals();
      server.wait();
      server.stop();
    }
  } catch (const Error& e) {
    err << "hyperviz: error " << error_code_name(e.code());
    if (e.row()) err << " at row " << *e.row();
    err << ": " << e.what() << '\n';
    return e.code() == ErrorCode::Io ? 1 : kExitDataError;
  }
  return 0;
}

}  // namespace hyperviz::cli
