#pragma once
// Deterministic output: shortest-round-trip decimal for doubles, CSV
// writing, and tagged binary dumps for paths, fields and schedules.
// No timestamps anywhere; identical runs produce identical bytes.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwrs/brownian.hpp"

namespace rwrs {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    std::string s((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return s;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
        append_row_raw(header);
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
        append_row_raw(cells);
    }
    const std::string& text() const { return out_; }
    void save(const std::filesystem::path& path) const { write_text_file(path, out_); }

  private:
    void append_row_raw(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }
    std::size_t cols_;
    std::string out_;
};

// ---- binary dumps ----------------------------------------------------
// Layout: 4-byte magic, u32 version, then little-endian fields. These are
// archival artifacts, not an interchange format.

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_f64(std::string& s, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(s, bits);
}

class ByteReader {
  public:
    ByteReader(const std::string& s) : s_(s) {}
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(s_[p_ + i])) << (8 * i);
        p_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(std::uint8_t(s_[p_ + i])) << (8 * i);
        p_ += 8;
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string out = s_.substr(p_, n);
        p_ += n;
        return out;
    }
    bool done() const { return p_ == s_.size(); }

  private:
    void need(std::size_t n) const {
        if (p_ + n > s_.size()) throw std::runtime_error("binary dump truncated");
    }
    const std::string& s_;
    std::size_t p_ = 0;
};

}  // namespace detail

inline void save_fine_path(const FinePath& p, const std::filesystem::path& path) {
    std::string s = "RWFP";
    detail::put_u32(s, 1);
    detail::put_u32(s, p.m);
    detail::put_f64(s, p.T);
    detail::put_u64(s, p.steps.size());
    s.reserve(s.size() + p.steps.size());
    for (auto st : p.steps) s.push_back(static_cast<char>(st));
    write_text_file(path, s);
}

inline FinePath load_fine_path(const std::filesystem::path& path) {
    const std::string s = read_text_file(path);
    detail::ByteReader r(s);
    if (r.bytes(4) != "RWFP") throw std::runtime_error("not a fine-path dump: " + path.string());
    if (r.u32() != 1) throw std::runtime_error("unsupported fine-path dump version");
    FinePath p;
    p.m = r.u32();
    p.sqrt_m = detail::integer_sqrt_of_square(p.m);
    p.T = r.f64();
    const std::uint64_t n = r.u64();
    const std::string body = r.bytes(n);
    p.steps.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto st = static_cast<std::int8_t>(body[i]);
        if (st != 1 && st != -1) throw std::runtime_error("corrupt fine-path dump");
        p.steps[i] = st;
    }
    if (!r.done()) throw std::runtime_error("trailing bytes in fine-path dump");
    return p;
}

inline void save_local_time(const LocalTimeField& f, const std::filesystem::path& path) {
    std::string s = "RWLT";
    detail::put_u32(s, 1);
    detail::put_u32(s, f.m);
    detail::put_f64(s, f.t);
    detail::put_u64(s, f.fine_used);
    detail::put_u64(s, f.source);
    detail::put_u64(s, static_cast<std::uint64_t>(static_cast<std::int64_t>(f.j_min)));
    detail::put_u64(s, f.counts.size());
    for (auto c : f.counts) detail::put_u64(s, static_cast<std::uint64_t>(c));
    write_text_file(path, s);
}

inline LocalTimeField load_local_time(const std::filesystem::path& path) {
    const std::string s = read_text_file(path);
    detail::ByteReader r(s);
    if (r.bytes(4) != "RWLT") throw std::runtime_error("not a local-time dump: " + path.string());
    if (r.u32() != 1) throw std::runtime_error("unsupported local-time dump version");
    LocalTimeField f;
    f.m = r.u32();
    f.t = r.f64();
    f.fine_used = r.u64();
    f.source = r.u64();
    f.j_min = static_cast<std::int32_t>(static_cast<std::int64_t>(r.u64()));
    const std::uint64_t n = r.u64();
    f.counts.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) f.counts[i] = static_cast<std::int64_t>(r.u64());
    if (!r.done()) throw std::runtime_error("trailing bytes in local-time dump");
    return f;
}

// Snapshot of an embedded scenery schedule (both sides).
struct ScheduleDump {
    double exit_step = 0.0;
    std::vector<double> sig_pos, rho_pos, dur_pos;
    std::vector<double> sig_neg, rho_neg, dur_neg;  // site x <= 0 at index -x
};

inline void save_schedule(const ScheduleDump& d, const std::filesystem::path& path) {
    std::string s = "RWSK";
    detail::put_u32(s, 1);
    detail::put_f64(s, d.exit_step);
    auto put_vec = [&s](const std::vector<double>& v) {
        detail::put_u64(s, v.size());
        for (double x : v) detail::put_f64(s, x);
    };
    put_vec(d.sig_pos);
    put_vec(d.rho_pos);
    put_vec(d.dur_pos);
    put_vec(d.sig_neg);
    put_vec(d.rho_neg);
    put_vec(d.dur_neg);
    write_text_file(path, s);
}

inline ScheduleDump load_schedule(const std::filesystem::path& path) {
    const std::string s = read_text_file(path);
    detail::ByteReader r(s);
    if (r.bytes(4) != "RWSK") throw std::runtime_error("not a schedule dump: " + path.string());
    if (r.u32() != 1) throw std::runtime_error("unsupported schedule dump version");
    ScheduleDump d;
    d.exit_step = r.f64();
    auto get_vec = [&r]() {
        const std::uint64_t n = r.u64();
        std::vector<double> v(n);
        for (std::uint64_t i = 0; i < n; ++i) v[i] = r.f64();
        return v;
    };
    d.sig_pos = get_vec();
    d.rho_pos = get_vec();
    d.dur_pos = get_vec();
    d.sig_neg = get_vec();
    d.rho_neg = get_vec();
    d.dur_neg = get_vec();
    if (!r.done()) throw std::runtime_error("trailing bytes in schedule dump");
    return d;
}

}  // namespace rwrs
