#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "quatmark/attacks.hpp"
#include "quatmark/errors.hpp"
#include "quatmark/image.hpp"
#include "quatmark/op_ledger.hpp"
#include "quatmark/qsvd.hpp"
#include "quatmark/watermark.hpp"

namespace quatmark::cli {

namespace fs = std::filesystem;

namespace {

// Filesystem failures while reading inputs or committing outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects outputs as temporary siblings and renames them into place only
// after every output has been written, so a failing command leaves no
// partial files behind.
class OutputSet {
 public:
  OutputSet() = default;
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    for (const auto& [tmp, target] : staged_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }

  void stage(const fs::path& target, const std::function<void(std::ostream&)>& write) {
    fs::path tmp = target;
    tmp += ".partial";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
      staged_.emplace_back(tmp, target);
      write(os);
      os.flush();
      if (!os) throw IoError("write failed for " + target.string());
    }
  }

  void commit() {
    for (const auto& [tmp, target] : staged_) {
      std::error_code ec;
      fs::rename(tmp, target, ec);
      if (ec) throw IoError("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
    }
    staged_.clear();
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> staged_;
};

RgbImage read_image(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path);
  return load_ppm(path);
}

BitMatrix read_bits(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path);
  return load_bits(path);
}

void stage_bits(OutputSet& outputs, const BitMatrix& bits, const fs::path& path) {
  const bool ascii = path.extension() == ".txt";
  outputs.stage(path, [&](std::ostream& os) {
    if (ascii)
      write_ascii_grid(bits, os);
    else
      write_pbm(bits, os);
  });
}

std::string format_fixed(double v, int digits) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  if (std::isinf(v)) {
    os << (v > 0 ? "inf" : "-inf");
  } else {
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
  }
  return os.str();
}

// Suffixes the three per-unit outputs of triple mode: w.pbm -> w_i.pbm ...
fs::path unit_path(const fs::path& base, int unit) {
  fs::path p = base;
  p.replace_filename(base.stem().string() + "_" + "ijk"[unit] + base.extension().string());
  return p;
}

std::vector<AttackSpec> table3_attacks() {
  static const char* const kSpecs[] = {"jpeg:20",    "jpeg:40",     "jpeg:60",    "motion:4,4",  "motion:6,6",
                                       "motion:9,9", "crop:0.1",    "crop:0.3",   "crop:0.5",    "rescale:0.5",
                                       "rescale:2",  "rescale:4",   "speckle:0.05", "salt_pepper:0.05"};
  std::vector<AttackSpec> out;
  for (const char* s : kSpecs) out.push_back(parse_attack_spec(s));
  return out;
}

std::vector<fs::path> list_images(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw IoError("no .ppm images in " + dir);
  return out;
}

std::uint64_t default_attack_seed(std::uint64_t key, AttackKind kind) { return key ^ attack_kind_tag(kind); }

struct Options {
  std::size_t threads = 1;

  std::string host, payload_path, out, report, in, spec, dims, a, b, images, suite = "table3";
  std::vector<std::string> payloads, bits_pair;
  std::string key_text, compare;
  double threshold = 0.02;
  bool triple = false;
  std::size_t bench_a = 9, bench_b = 6, kmax = 10, trials = 3;
  std::uint64_t seed = 1;
  bool no_givens = false;
  std::string ledger;
};

int cmd_embed(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t key = parse_key(o.key_text);
  EmbedConfig cfg;
  cfg.threshold = o.threshold;
  cfg.threads = o.threads;
  cfg.mode = o.triple ? EmbedMode::kTriple : EmbedMode::kSingle;
  cfg.validate();

  const RgbImage host = read_image(o.host);
  std::vector<BitMatrix> payloads;
  for (const std::string& p : o.payloads) payloads.push_back(read_bits(p));
  if (!o.triple && payloads.size() != 1) throw PreconditionError("single mode takes exactly one --payload");
  if (o.triple && payloads.size() != 1 && payloads.size() != 3)
    throw PreconditionError("triple mode takes one or three --payload files");

  EmbedOutput result;
  if (o.triple) {
    const std::array<BitMatrix, 3> three =
        payloads.size() == 3 ? std::array<BitMatrix, 3>{payloads[0], payloads[1], payloads[2]}
                             : std::array<BitMatrix, 3>{payloads[0], payloads[0], payloads[0]};
    result = embed_triple(host, three, {key}, cfg);
  } else {
    result = embed(host, payloads[0], {key}, cfg);
  }

  OutputSet outputs;
  outputs.stage(o.out, [&](std::ostream& os) { write_ppm(result.image, os); });
  if (!o.report.empty()) outputs.stage(o.report, [&](std::ostream& os) { write_report_csv(os, result.report); });
  outputs.commit();
  out << "PSNR " << format_fixed(result.report.psnr, 4) << " dB, " << result.report.records.size()
      << " records, " << result.report.degenerate << " seeded\n";
  if (result.report.unverified > 0)
    err << "warning: " << result.report.unverified << " blocks do not decode to their bit after 8-bit storage\n";
  return kOk;
}

int cmd_extract(const Options& o, std::ostream& out) {
  const std::uint64_t key = parse_key(o.key_text);
  const Dims dims = parse_dims(o.dims);
  EmbedConfig cfg;
  cfg.threads = o.threads;
  const RgbImage img = read_image(o.in);
  std::optional<BitMatrix> reference;
  if (!o.compare.empty()) reference = read_bits(o.compare);

  std::ostringstream summary;
  OutputSet outputs;
  if (o.triple) {
    const auto three = extract_triple(img, {key}, dims.rows, dims.cols, cfg);
    for (int a = 0; a < 3; ++a) {
      if (reference) summary << "BER " << "ijk"[a] << ' ' << format_fixed(ber(*reference, three[a].bits), 4) << '\n';
      stage_bits(outputs, three[a].bits, unit_path(o.out, a));
    }
    if (three[0].erasures > 0) summary << "erasures " << three[0].erasures << '\n';
  } else {
    const ExtractOutput result = extract(img, {key}, dims.rows, dims.cols, cfg);
    if (reference) summary << "BER " << format_fixed(ber(*reference, result.bits), 4) << '\n';
    if (result.erasures > 0) summary << "erasures " << result.erasures << '\n';
    stage_bits(outputs, result.bits, o.out);
  }
  outputs.commit();
  out << summary.str();
  return kOk;
}

int cmd_attack(const Options& o, std::ostream&) {
  const AttackSpec spec = parse_attack_spec(o.spec);
  const std::uint64_t key = o.key_text.empty() ? 0 : parse_key(o.key_text);
  const RgbImage img = read_image(o.in);
  const RgbImage attacked = apply_attack(img, spec, default_attack_seed(key, spec.kind));
  OutputSet outputs;
  outputs.stage(o.out, [&](std::ostream& os) { write_ppm(attacked, os); });
  outputs.commit();
  return kOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  const bool images = !o.a.empty() || !o.b.empty();
  if (images == !o.bits_pair.empty()) throw PreconditionError("metrics takes either --a/--b or --bits A B");
  if (images) {
    if (o.a.empty() || o.b.empty()) throw PreconditionError("metrics needs both --a and --b");
    out << "PSNR " << format_fixed(psnr(read_image(o.a), read_image(o.b)), 4) << '\n';
  } else {
    out << "BER " << format_fixed(ber(read_bits(o.bits_pair[0]), read_bits(o.bits_pair[1])), 4) << '\n';
  }
  return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const PairStats stats = analyze_pairs(read_image(o.in), o.threads);
  OutputSet outputs;
  outputs.stage(o.out, [&](std::ostream& os) { write_nc_csv(os, stats); });
  outputs.commit();
  out << "blocks " << stats.grid_rows * stats.grid_cols << ", degenerate " << stats.degenerate_count << '\n';
  return kOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  BidiagOptions options;
  options.use_givens = !o.no_givens;
  const std::vector<BenchRow> rows = bench_qsvd(o.bench_a, o.bench_b, o.kmax, o.trials, o.seed, options);
  OutputSet outputs;
  outputs.stage(o.out, [&](std::ostream& os) { write_bench_csv(os, rows); });
  if (!o.ledger.empty()) {
    OpLedger ledger;
    qsvd(random_quat_matrix(o.bench_a, o.bench_b, o.seed), &ledger, options);
    outputs.stage(o.ledger, [&](std::ostream& os) { os << ledger.report(); });
  }
  outputs.commit();
  out << rows.size() << " rows\n";
  return kOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  const std::uint64_t key = o.key_text.empty() ? 1 : parse_key(o.key_text);
  if (o.suite != "table2" && o.suite != "table3")
    throw PreconditionError("unknown suite '" + o.suite + "' (expected table2 or table3)");
  const std::vector<fs::path> images = list_images(o.images);

  std::ostringstream csv;
  csv.imbue(std::locale::classic());
  if (o.suite == "table2") {
    csv << "image,unit,first,second,nc\n";
    for (const fs::path& path : images) {
      const PairStats stats = analyze_pairs(load_ppm(path), o.threads);
      for (int axis = 0; axis < 3; ++axis)
        for (std::size_t p = 0; p < PairStats::kPairs.size(); ++p)
          csv << path.stem().string() << ',' << "ijk"[axis] << ",u" << PairStats::kPairs[p][0] << "1,u"
              << PairStats::kPairs[p][1] << "1," << format_fixed(stats.nc[axis][p], 6) << '\n';
    }
  } else {
    EmbedConfig cfg;
    cfg.threshold = o.threshold;
    cfg.threads = o.threads;
    cfg.validate();
    const BitMatrix payload = o.payload_path.empty() ? synthetic_logo(64, 64) : read_bits(o.payload_path);
    const std::vector<AttackSpec> attacks = table3_attacks();
    csv << "image,attack,threshold,psnr,ber\n";
    for (const fs::path& path : images) {
      const RgbImage host = load_ppm(path);
      const EmbedOutput marked = embed(host, payload, {key}, cfg);
      const std::string name = path.stem().string();
      const std::string t = format_fixed(o.threshold, 4);
      const std::string p = format_fixed(marked.report.psnr, 4);
      const ExtractOutput clean = extract(marked.image, {key}, payload.rows(), payload.cols(), cfg);
      csv << name << ",none," << t << ',' << p << ',' << format_fixed(ber(payload, clean.bits), 4) << '\n';
      for (const AttackSpec& spec : attacks) {
        const RgbImage attacked = quantize(apply_attack(marked.image, spec, default_attack_seed(key, spec.kind)));
        const ExtractOutput got = extract(attacked, {key}, payload.rows(), payload.cols(), cfg);
        csv << name << ',' << spec.str() << ',' << t << ',' << p << ',' << format_fixed(ber(payload, got.bits), 4)
            << '\n';
      }
    }
  }
  OutputSet outputs;
  outputs.stage(o.out, [&](std::ostream& os) { os << csv.str(); });
  outputs.commit();
  out << images.size() << " images\n";
  return kOk;
}

}  // namespace

std::uint64_t parse_key(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size())
    throw PreconditionError("invalid key '" + std::string(text) + "' (decimal or 0x-hex 64-bit)");
  return value;
}

Dims parse_dims(std::string_view text) {
  const auto x = text.find_first_of("xX");
  Dims d;
  bool ok = x != std::string_view::npos && x > 0 && x + 1 < text.size();
  if (ok) {
    const auto r = std::from_chars(text.data(), text.data() + x, d.rows);
    const auto c = std::from_chars(text.data() + x + 1, text.data() + text.size(), d.cols);
    ok = r.ec == std::errc{} && r.ptr == text.data() + x && c.ec == std::errc{} &&
         c.ptr == text.data() + text.size() && d.rows > 0 && d.cols > 0;
  }
  if (!ok) throw PreconditionError("invalid dims '" + std::string(text) + "' (expected ROWSxCOLS)");
  return d;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Quaternion SVD engine and blind colour-image watermarking", "quatmark"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "Worker threads for block-level work (0 = all cores)")->capture_default_str();

  auto* embed_cmd = app.add_subcommand("embed", "Embed a bit payload into a host image");
  embed_cmd->add_option("--host", o.host, "Host image (binary P6)")->required();
  embed_cmd->add_option("--payload", o.payloads, "Payload bits (PBM or ASCII grid); triple mode takes 1 or 3")
      ->required();
  embed_cmd->add_option("--key", o.key_text, "64-bit key, decimal or 0x-hex")->required();
  embed_cmd->add_option("--threshold", o.threshold, "Magnitude gap threshold T")->capture_default_str();
  embed_cmd->add_flag("--triple", o.triple, "Carry one bit in each of i, j and k");
  embed_cmd->add_option("--out", o.out, "Watermarked image (P6)")->required();
  embed_cmd->add_option("--report", o.report, "Per-block embedding report (CSV)");

  auto* extract_cmd = app.add_subcommand("extract", "Blind extraction of a payload");
  extract_cmd->add_option("--in", o.in, "Watermarked image (P6)")->required();
  extract_cmd->add_option("--key", o.key_text, "64-bit key, decimal or 0x-hex")->required();
  extract_cmd->add_option("--dims", o.dims, "Payload size ROWSxCOLS")->required();
  extract_cmd->add_flag("--triple", o.triple, "Read i, j and k separately (writes NAME_i, NAME_j, NAME_k)");
  extract_cmd->add_option("--out", o.out, "Extracted bits (PBM, or ASCII grid for .txt)")->required();
  extract_cmd->add_option("--compare", o.compare, "Reference payload; prints the BER");

  auto* attack_cmd = app.add_subcommand("attack", "Apply one attack to an image");
  attack_cmd->add_option("--in", o.in, "Input image (P6)")->required();
  attack_cmd->add_option("--spec", o.spec, "kind:param[,param][,seed]")->required();
  attack_cmd->add_option("--key", o.key_text, "Key mixed into the default noise seed");
  attack_cmd->add_option("--out", o.out, "Attacked image (P6)")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR of two images or BER of two bit matrices");
  metrics_cmd->add_option("--a", o.a, "First image");
  metrics_cmd->add_option("--b", o.b, "Second image");
  metrics_cmd->add_option("--bits", o.bits_pair, "Two bit matrices")->expected(2);

  auto* analyze_cmd = app.add_subcommand("analyze-nc", "NC table of first-column U coefficient pairs");
  analyze_cmd->add_option("--in", o.in, "Image (P6)")->required();
  analyze_cmd->add_option("--out", o.out, "CSV output")->required();

  auto* bench_cmd = app.add_subcommand("bench-qsvd", "Time QSVD of random (a k) x (b k) matrices");
  bench_cmd->add_option("--a", o.bench_a, "Row multiplier")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--b", o.bench_b, "Column multiplier")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--kmax", o.kmax, "Largest k")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trials", o.trials, "Timed repetitions per k (best kept)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", o.seed, "Matrix seed")->capture_default_str();
  bench_cmd->add_flag("--no-givens", o.no_givens, "Use H3 only in the bidiagonal reduction");
  bench_cmd->add_option("--out", o.out, "CSV output")->required();
  bench_cmd->add_option("--ledger", o.ledger, "Operation ledger of one a x b QSVD");

  auto* reproduce_cmd = app.add_subcommand("reproduce", "Run an evaluation grid over a directory of images");
  reproduce_cmd->add_option("--suite", o.suite, "table2 (NC) or table3 (attacks)")->capture_default_str();
  reproduce_cmd->add_option("--images", o.images, "Directory of .ppm hosts")->required();
  reproduce_cmd->add_option("--t", o.threshold, "Threshold T")->capture_default_str();
  reproduce_cmd->add_option("--key", o.key_text, "64-bit key (default 1)");
  reproduce_cmd->add_option("--payload", o.payload_path, "Payload bits (default: 64x64 synthetic logo)");
  reproduce_cmd->add_option("--out", o.out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*embed_cmd) return cmd_embed(o, out, err);
    if (*extract_cmd) return cmd_extract(o, out);
    if (*attack_cmd) return cmd_attack(o, out);
    if (*metrics_cmd) return cmd_metrics(o, out);
    if (*analyze_cmd) return cmd_analyze(o, out);
    if (*bench_cmd) return cmd_bench(o, out);
    if (*reproduce_cmd) return cmd_reproduce(o, out);
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << '\n';
    return kInvariant;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  err << app.help();
  return kUsage;
}

}  // namespace quatmark::cli
