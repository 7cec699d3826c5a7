#include "shasta/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shasta {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::size_t kHeaderBytes = 40;

class Writer {
 public:
  void u64(std::uint64_t x) { raw(&x, sizeof x); }
  void doubles(const double* p, Index n) { raw(p, static_cast<std::size_t>(n) * sizeof(double)); }
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  std::uint64_t u64() {
    std::uint64_t x;
    raw(&x, sizeof x);
    return x;
  }
  void doubles(double* p, Index n) { raw(p, static_cast<std::size_t>(n) * sizeof(double)); }
  void raw(void* p, std::size_t n) {
    if (pos_ + n > bytes_.size()) throw std::runtime_error("checkpoint truncated");
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t checkpoint_size(Index d, Index k, Index groups) {
  const auto n = static_cast<std::size_t>(d * k + groups + k * k * d + k * d + d * k + 2 * groups);
  return kHeaderBytes + n * sizeof(double);
}

std::string serialize_state(const ShastaState& st) {
  Writer w;
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u64(static_cast<std::uint64_t>(st.d()));
  w.u64(static_cast<std::uint64_t>(st.k()));
  w.u64(static_cast<std::uint64_t>(st.groups()));
  w.u64(st.t);
  w.doubles(st.f.data(), st.f.size());
  w.doubles(st.v.data(), st.v.size());
  w.doubles(st.r_bar.data(), st.r_bar.size());
  w.doubles(st.s_bar.data(), st.s_bar.size());
  w.doubles(st.f_hat.data(), st.f_hat.size());
  w.doubles(st.theta_bar.data(), st.theta_bar.size());
  w.doubles(st.rho_bar.data(), st.rho_bar.size());
  return w.take();
}

ShastaState deserialize_state(const std::string& bytes) {
  Reader r(bytes);
  char magic[sizeof kCheckpointMagic];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a shasta checkpoint (bad magic or version)");
  }
  const auto d = static_cast<Index>(r.u64());
  const auto k = static_cast<Index>(r.u64());
  const auto groups = static_cast<Index>(r.u64());
  if (d < 1 || k < 1 || k > d || groups < 1 || d > (Index{1} << 32) || groups > (Index{1} << 32)) {
    throw std::runtime_error("checkpoint declares an invalid shape");
  }
  if (bytes.size() != checkpoint_size(d, k, groups)) {
    throw std::runtime_error("checkpoint size does not match its declared shape");
  }
  ShastaState st;
  st.t = r.u64();
  st.f.resize(d, k);
  st.v.resize(groups);
  st.r_bar.resize(k, k * d);
  st.s_bar.resize(k, d);
  st.f_hat.resize(d, k);
  st.theta_bar.resize(groups);
  st.rho_bar.resize(groups);
  r.doubles(st.f.data(), st.f.size());
  r.doubles(st.v.data(), st.v.size());
  r.doubles(st.r_bar.data(), st.r_bar.size());
  r.doubles(st.s_bar.data(), st.s_bar.size());
  r.doubles(st.f_hat.data(), st.f_hat.size());
  r.doubles(st.theta_bar.data(), st.theta_bar.size());
  r.doubles(st.rho_bar.data(), st.rho_bar.size());
  return st;
}

void save_state(const ShastaState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto bytes = serialize_state(state);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ShastaState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_state(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string state_to_json(const ShastaState& st, bool full) {
  using nlohmann::json;
  auto vec = [](const auto& x) { return std::vector<double>(x.data(), x.data() + x.size()); };
  json j;
  j["format"] = "shasta-checkpoint-v1";
  j["d"] = st.d();
  j["k"] = st.k();
  j["groups"] = st.groups();
  j["t"] = st.t;
  j["v"] = vec(st.v);
  j["theta_bar"] = vec(st.theta_bar);
  j["rho_bar"] = vec(st.rho_bar);
  j["bytes"] = checkpoint_size(st.d(), st.k(), st.groups());
  if (full) {
    json rows = json::array();
    for (Index r = 0; r < st.d(); ++r) rows.push_back(vec(Vector(st.f.row(r).transpose())));
    j["f"] = rows;
    json rbar = json::array();
    for (Index r = 0; r < st.d(); ++r) rbar.push_back(vec(Matrix(st.r_block(r))));
    j["r_bar"] = rbar;
    json sbar = json::array();
    for (Index r = 0; r < st.d(); ++r) sbar.push_back(vec(Vector(st.s_bar.col(r))));
    j["s_bar"] = sbar;
  }
  return j.dump(2);
}

}  // namespace shasta
