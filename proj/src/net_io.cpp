#include "dnet/net_io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace dnet {

namespace {

// Whitespace-separated integers with '#' comments stripped.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back(tok);
    }
  }

  long next(const char* what) {
    if (pos_ >= tokens_.size()) throw Error(fmt::format("unexpected end of input while reading {}", what));
    const std::string& tok = tokens_[pos_++];
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw Error(fmt::format("expected integer for {}, got '{}'", what, tok));
    return v;
  }

  void expect_end() const {
    if (pos_ != tokens_.size()) throw Error(fmt::format("{} trailing tokens", tokens_.size() - pos_));
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

NetParams read_header(TokenReader& tr) {
  NetParams p;
  p.b = static_cast<int>(tr.next("b"));
  p.s = static_cast<int>(tr.next("s"));
  p.n = static_cast<int>(tr.next("n"));
  p.m = static_cast<int>(tr.next("m"));
  p.validate();
  return p;
}

int read_digit(TokenReader& tr, int b) {
  const long v = tr.next("digit");
  if (v < 0 || v >= b) throw Error(fmt::format("digit {} out of range for base {}", v, b));
  return static_cast<int>(v);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return in;
}

}  // namespace

DigitalNet read_net(std::istream& in) {
  TokenReader tr(in);
  const NetParams p = read_header(tr);
  std::vector<DigitMatrix> basis;
  for (int k = 0; k < p.m; ++k) {
    DigitMatrix g(p.b, p.s, p.n);
    for (int i = 0; i < p.s; ++i) {
      for (int j = 0; j < p.n; ++j) g.set(i, j, read_digit(tr, p.b));
    }
    basis.push_back(std::move(g));
  }
  tr.expect_end();
  return DigitalNet(p, std::move(basis));
}

DigitalNet read_net_file(const std::string& path) {
  auto in = open_in(path);
  return read_net(in);
}

void write_net(std::ostream& out, const DigitalNet& net, const std::string& comment) {
  const auto& p = net.params();
  if (!comment.empty()) {
    std::istringstream cs(comment);
    std::string line;
    while (std::getline(cs, line)) fmt::print(out, "# {}\n", line);
  }
  fmt::print(out, "{} {} {} {}\n", p.b, p.s, p.n, p.m);
  for (const auto& g : net.basis()) {
    out << '\n';
    for (int i = 0; i < p.s; ++i) {
      for (int j = 0; j < p.n; ++j) {
        if (j) out << ' ';
        out << static_cast<int>(g(i, j));
      }
      out << '\n';
    }
  }
}

void write_net_file(const std::string& path, const DigitalNet& net, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  write_net(out, net, comment);
}

DigitalNet ingest_generator_matrices(std::istream& in, std::optional<int> keep_m, std::optional<int> keep_n) {
  TokenReader tr(in);
  const NetParams src = read_header(tr);
  // c[i][j][k]
  std::vector<std::vector<std::vector<int>>> c(
      static_cast<std::size_t>(src.s),
      std::vector<std::vector<int>>(static_cast<std::size_t>(src.n), std::vector<int>(static_cast<std::size_t>(src.m))));
  for (int i = 0; i < src.s; ++i) {
    for (int j = 0; j < src.n; ++j) {
      for (int k = 0; k < src.m; ++k) c[i][j][k] = read_digit(tr, src.b);
    }
  }
  tr.expect_end();
  NetParams p = src;
  if (keep_m) {
    if (*keep_m < 0 || *keep_m > src.m) throw Error(fmt::format("cannot keep m={} of {} columns", *keep_m, src.m));
    p.m = *keep_m;
  }
  if (keep_n) {
    if (*keep_n < 1 || *keep_n > src.n) throw Error(fmt::format("cannot keep n={} of {} digit rows", *keep_n, src.n));
    p.n = *keep_n;
  }
  if (p.m > p.s * p.n) throw Error("more generators than digits after truncation");
  std::vector<DigitMatrix> basis;
  for (int k = 0; k < p.m; ++k) {
    DigitMatrix g(p.b, p.s, p.n);
    for (int i = 0; i < p.s; ++i) {
      for (int j = 0; j < p.n; ++j) g.set(i, j, c[i][j][k]);
    }
    basis.push_back(std::move(g));
  }
  return DigitalNet(p, std::move(basis));
}

DigitalNet ingest_generator_file(const std::string& path, std::optional<int> keep_m, std::optional<int> keep_n) {
  auto in = open_in(path);
  return ingest_generator_matrices(in, keep_m, keep_n);
}

void write_generator_matrices(std::ostream& out, const DigitalNet& net) {
  const auto& p = net.params();
  fmt::print(out, "{} {} {} {}\n", p.b, p.s, p.n, p.m);
  for (int i = 0; i < p.s; ++i) {
    out << '\n';
    for (int j = 0; j < p.n; ++j) {
      for (int k = 0; k < p.m; ++k) {
        if (k) out << ' ';
        out << static_cast<int>(net.basis()[k](i, j));
      }
      out << '\n';
    }
  }
}

}  // namespace dnet
