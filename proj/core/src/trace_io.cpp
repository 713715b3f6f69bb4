#include "twomode/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "twomode/error.hpp"

namespace twomode {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, fmt::format("{}:{}: {}", source, line, what));
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::ParseError, fmt::format("'{}' is not an unsigned integer", text));
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(Errc::ParseError, fmt::format("'{}' is not a number", text));
  }
  return v;
}

void write_trace(std::ostream& out, const HomodyneTrace& trace) {
  const auto& c = trace.config;
  const std::string_view mode = trace.label == "vac" ? std::string_view("vac") : to_string(c.mode);
  std::string buf;
  buf.reserve(48 * trace.samples.size() + 512);
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "# mode={}\n", mode);
  fmt::format_to(it, "# eta={:.17g}\n", c.eta);
  fmt::format_to(it, "# n={}\n", trace.samples.size());
  fmt::format_to(it, "# seed={}\n", c.seed);
  fmt::format_to(it, "# sweep_start={:.17g}\n", c.sweep_start);
  fmt::format_to(it, "# sweep_end={:.17g}\n", c.sweep_end);
  fmt::format_to(it, "# shotnoise_var={:.17g}\n", trace.shotnoise_var);
  fmt::format_to(it, "# electronic_noise_var={:.17g}\n", c.electronic_noise_var);
  fmt::format_to(it, "# phase_jitter={:.17g}\n", c.phase_jitter);
  for (const auto& s : trace.samples) fmt::format_to(it, "{:.17g}\t{:.17g}\n", s.theta, s.x);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_trace_file(const std::filesystem::path& path, const HomodyneTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, fmt::format("cannot open {} for writing", path.string()));
  write_trace(out, trace);
  if (!out) throw Error(Errc::InvalidArgument, fmt::format("write to {} failed", path.string()));
}

HomodyneTrace read_trace(std::istream& in, std::string_view source) {
  HomodyneTrace trace;
  trace.config.phase_jitter = 0.0;
  bool have_mode = false;
  bool in_body = false;
  std::optional<std::uint64_t> declared_n;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    try {
      if (view.front() == '#') {
        if (in_body) parse_fail(source, lineno, "header line after the first sample");
        const std::string_view kv = trim(view.substr(1));
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) continue;  // free-form comment
        const std::string_view key = trim(kv.substr(0, eq));
        const std::string_view value = trim(kv.substr(eq + 1));
        if (key == "mode") {
          if (value == "vac") {
            trace.label = "vac";
          } else if (auto m = parse_mode(value)) {
            trace.config.mode = *m;
            trace.label = std::string(value);
          } else {
            parse_fail(source, lineno, fmt::format("unknown mode '{}'", value));
          }
          have_mode = true;
        } else if (key == "eta") {
          trace.config.eta = parse_double(value);
        } else if (key == "n") {
          declared_n = parse_u64(value);
        } else if (key == "seed") {
          trace.config.seed = parse_u64(value);
        } else if (key == "sweep_start") {
          trace.config.sweep_start = parse_double(value);
        } else if (key == "sweep_end") {
          trace.config.sweep_end = parse_double(value);
        } else if (key == "shotnoise_var") {
          trace.shotnoise_var = parse_double(value);
        } else if (key == "electronic_noise_var") {
          trace.config.electronic_noise_var = parse_double(value);
        } else if (key == "phase_jitter") {
          trace.config.phase_jitter = parse_double(value);
        }
        continue;
      }
      in_body = true;
      const auto tab = view.find_first_of("\t ");
      if (tab == std::string_view::npos) parse_fail(source, lineno, "expected 'theta<TAB>x'");
      trace.samples.push_back({parse_double(view.substr(0, tab)), parse_double(view.substr(tab + 1))});
    } catch (const Error& e) {
      if (e.code() != Errc::ParseError || std::string_view(e.what()).find(source) != std::string_view::npos) throw;
      parse_fail(source, lineno, e.what());
    }
  }
  if (!have_mode) parse_fail(source, lineno, "missing '# mode=' header");
  if (declared_n && *declared_n != trace.samples.size()) {
    parse_fail(source, lineno,
               fmt::format("header declares n={} but body has {} samples", *declared_n,
                           trace.samples.size()));
  }
  if (!(trace.shotnoise_var > 0.0)) parse_fail(source, lineno, "shotnoise_var must be positive");
  trace.config.n_samples = trace.samples.size();
  return trace;
}

HomodyneTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, fmt::format("cannot open {}", path.string()));
  return read_trace(in, path.string());
}

CovarianceMatrix parse_cm(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t\r\n,[]", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t\r\n,[]", start);
    if (end == std::string_view::npos) end = text.size();
    values.push_back(parse_double(text.substr(start, end - start)));
    pos = end;
  }
  if (values.size() != 16) {
    throw Error(Errc::ParseError, fmt::format("expected 16 CM entries, got {}", values.size()));
  }
  return CovarianceMatrix::from_row_major(values);
}

std::string format_cm(const CovarianceMatrix& cm) {
  std::string out;
  const auto rm = cm.row_major();
  for (std::size_t i = 0; i < rm.size(); ++i) {
    if (i) out += ' ';
    out += format_double(rm[i]);
  }
  return out;
}

}  // namespace twomode
