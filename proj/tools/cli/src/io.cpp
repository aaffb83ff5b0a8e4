#include "mfgcli/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace mfg::cli {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string field_csv(const Field& f) {
  const Grid& g = f.grid();
  std::string out = g.dim() == 1 ? "cell,x,value\n" : "cell,x,y,value\n";
  out.reserve(out.size() + 48 * f.size());
  for (std::size_t c = 0; c < f.size(); ++c) {
    const Vec2 x = g.center(c);
    out += std::to_string(c);
    out += ',';
    out += format_double(x[0]);
    if (g.dim() == 2) {
      out += ',';
      out += format_double(x[1]);
    }
    out += ',';
    out += format_double(f[c]);
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

double parse_number(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": malformed number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Field read_field_csv(const std::filesystem::path& path, const Grid& grid) {
  const std::string text = read_text(path);
  std::istringstream is(text);
  std::string line;
  const std::string header = grid.dim() == 1 ? "cell,x,value" : "cell,x,y,value";
  if (!std::getline(is, line) || line != header) {
    throw std::runtime_error(path.string() + ": expected header '" + header + "'");
  }
  const std::size_t cols = grid.dim() == 1 ? 3 : 4;
  Field f(grid);
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> parts;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      parts.push_back(rest.substr(0, pos));
    }
    parts.push_back(rest);
    const std::size_t lineno = row + 2;
    if (parts.size() != cols) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                               " columns");
    }
    if (row >= grid.size() || parse_number(parts[0], path, lineno) != static_cast<double>(row)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": unexpected cell index");
    }
    const Vec2 x = grid.center(row);
    for (int a = 0; a < grid.dim(); ++a) {
      const double xa = parse_number(parts[1 + a], path, lineno);
      if (std::abs(xa - x[a]) > 1e-9 * (1.0 + std::abs(x[a]))) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": coordinate does not match the grid");
      }
    }
    f[row] = parse_number(parts[cols - 1], path, lineno);
    ++row;
  }
  if (row != grid.size()) {
    throw std::runtime_error(path.string() + ": " + std::to_string(row) + " rows, grid has " +
                             std::to_string(grid.size()) + " cells");
  }
  return f;
}

std::string git_blob_hash(const std::string& contents) {
  const std::string header = "blob " + std::to_string(contents.size()) + std::string(1, '\0');
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("sha1: out of memory");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, contents.data(), contents.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha1 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace mfg::cli
