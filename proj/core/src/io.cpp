#include "fiberair/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace fiberair {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

// RFC 4180 fields of one line (no embedded newlines).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("CSV: bad number '" + s + "'");
  return v;
}

template <typename T>
T parse_int(const std::string& s) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("CSV: bad integer '" + s + "'");
  return v;
}

void expect_header(std::ifstream& in, const std::string& header, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

std::string records_csv_header() {
  return "scheme,receiver,power_dbm,air,std_error,h0,sigma_n,phase_model,sigma_z,a_mix,l0,n_train,n_eval,seed,"
         "config_digest,phase_offset,degenerate_noise,ok,error";
}

void export_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << records_csv_header() << '\n';
  for (const auto& r : records) {
    const auto& a = r.result;
    out << to_string(r.scheme) << ',' << to_string(r.receiver) << ',' << format_double(r.power_dbm) << ','
        << format_double(a.air) << ',' << format_double(a.std_error) << ',' << format_double(a.params.h0) << ','
        << format_double(a.params.sigma_n) << ',' << to_string(a.params.phase_model) << ','
        << format_double(a.params.sigma_z) << ',' << format_double(a.params.a_mix) << ',' << a.params.l0 << ','
        << a.n_train << ',' << a.n_eval << ',' << a.seed << ',' << quote(a.config_digest) << ','
        << format_double(r.phase_offset) << ',' << (r.degenerate_noise ? 1 : 0) << ',' << (r.ok ? 1 : 0) << ','
        << quote(r.error) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, records_csv_header(), path);
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 19) throw std::runtime_error(path.string() + ": expected 19 fields, got " + std::to_string(f.size()));
    RunRecord r;
    r.scheme = parse_scheme(f[0]);
    r.receiver = parse_phase_model(f[1]);
    r.power_dbm = parse_double(f[2]);
    auto& a = r.result;
    a.air = parse_double(f[3]);
    a.std_error = parse_double(f[4]);
    a.params.h0 = parse_double(f[5]);
    a.params.sigma_n = parse_double(f[6]);
    a.params.phase_model = parse_phase_model(f[7]);
    a.params.sigma_z = parse_double(f[8]);
    a.params.a_mix = parse_double(f[9]);
    a.params.l0 = parse_int<int>(f[10]);
    a.n_train = parse_int<std::size_t>(f[11]);
    a.n_eval = parse_int<std::size_t>(f[12]);
    a.seed = parse_int<std::uint64_t>(f[13]);
    a.config_digest = f[14];
    r.phase_offset = parse_double(f[15]);
    r.degenerate_noise = f[16] == "1";
    r.ok = f[17] == "1";
    r.error = f[18];
    out.push_back(std::move(r));
  }
  return out;
}

void export_csv(const CorrelationGrid& grid, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "delta_f_hz,tau_s,re,im\n";
  for (std::size_t i = 0; i < grid.delta_f.size(); ++i)
    for (std::size_t k = 0; k < grid.tau.size(); ++k) {
      const cplx v = grid.at(i, k);
      out << format_double(grid.delta_f[i]) << ',' << format_double(grid.tau[k]) << ',' << format_double(v.real())
          << ',' << format_double(v.imag()) << '\n';
    }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CorrelationGrid read_grid_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "delta_f_hz,tau_s,re,im", path);
  std::vector<double> df, tau;
  CorrelationGrid g;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw std::runtime_error(path.string() + ": expected 4 fields");
    const double d = parse_double(f[0]), t = parse_double(f[1]);
    if (df.empty() || df.back() != d) df.push_back(d);
    if (df.size() == 1) tau.push_back(t);
    g.values.emplace_back(parse_double(f[2]), parse_double(f[3]));
  }
  if (df.empty() || g.values.size() != df.size() * tau.size())
    throw std::runtime_error(path.string() + ": rows do not form a rectangular grid");
  g.delta_f = std::move(df);
  g.tau = std::move(tau);
  return g;
}

void export_sections_csv(const CorrelationGrid& grid, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "section,coordinate,value\n";
  const auto fs = grid.frequency_section();
  for (std::size_t i = 0; i < fs.size(); ++i)
    out << "frequency," << format_double(grid.delta_f[i]) << ',' << format_double(fs[i]) << '\n';
  const auto ts = grid.time_section();
  for (std::size_t k = 0; k < ts.size(); ++k)
    out << "time," << format_double(grid.tau[k]) << ',' << format_double(ts[k]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_symbols_csv(const CellData& data, const std::filesystem::path& path) {
  if (data.x.size() != data.y.size()) throw std::invalid_argument("write_symbols_csv: length mismatch");
  auto out = open_out(path);
  out << "x_re,x_im,y_re,y_im\n";
  for (std::size_t i = 0; i < data.x.size(); ++i)
    out << format_double(data.x[i].real()) << ',' << format_double(data.x[i].imag()) << ','
        << format_double(data.y[i].real()) << ',' << format_double(data.y[i].imag()) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CellData read_symbols_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  expect_header(in, "x_re,x_im,y_re,y_im", path);
  CellData d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw std::runtime_error(path.string() + ": expected 4 fields");
    d.x.emplace_back(parse_double(f[0]), parse_double(f[1]));
    d.y.emplace_back(parse_double(f[2]), parse_double(f[3]));
  }
  return d;
}

}  // namespace fiberair
