#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "advmri/types.hpp"

namespace advmri {

// ---------------------------------------------------------------------------
// CFI, the complex float image format: magic "CFI1", u32-LE rows, u32-LE
// cols, then row-major interleaved f32-LE (re, im) pairs. Measurement
// vectors reuse the format with rows = 1; mask bitmaps store 0/1 real parts.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(bytes, 4);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char bytes[4];
    is.read(reinterpret_cast<char*>(bytes), 4);
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) |
           (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline void put_f32(std::ostream& os, float v) { put_u32(os, std::bit_cast<std::uint32_t>(v)); }

inline float get_f32(std::istream& is) { return std::bit_cast<float>(get_u32(is)); }

}  // namespace detail

struct CfiData {
    std::uint32_t rows = 0, cols = 0;
    std::vector<cdouble> values;  // row-major
};

inline void write_cfi(const std::filesystem::path& path, std::uint32_t rows, std::uint32_t cols,
                      const std::vector<cdouble>& values) {
    require(values.size() == static_cast<std::size_t>(rows) * cols, "write_cfi: size mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_cfi: cannot open " + path.string());
    os.write("CFI1", 4);
    detail::put_u32(os, rows);
    detail::put_u32(os, cols);
    for (cdouble v : values) {
        detail::put_f32(os, static_cast<float>(v.real()));
        detail::put_f32(os, static_cast<float>(v.imag()));
    }
    if (!os) throw std::runtime_error("write_cfi: write failed for " + path.string());
}

inline CfiData read_cfi(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_cfi: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "CFI1")
        throw std::runtime_error("read_cfi: bad magic in " + path.string());
    CfiData d;
    d.rows = detail::get_u32(is);
    d.cols = detail::get_u32(is);
    d.values.resize(static_cast<std::size_t>(d.rows) * d.cols);
    for (cdouble& v : d.values) {
        const float re = detail::get_f32(is);
        const float im = detail::get_f32(is);
        v = cdouble(re, im);
    }
    if (!is) throw std::runtime_error("read_cfi: truncated file " + path.string());
    return d;
}

inline void write_image_cfi(const std::filesystem::path& path, const Image& img) {
    write_cfi(path, static_cast<std::uint32_t>(img.n), static_cast<std::uint32_t>(img.n), img.data);
}

inline Image read_image_cfi(const std::filesystem::path& path) {
    const CfiData d = read_cfi(path);
    require(d.rows == d.cols && d.rows > 0, "read_image_cfi: not a square image");
    Image img(static_cast<int>(d.rows));
    img.data = d.values;
    return img;
}

inline void write_measurement_cfi(const std::filesystem::path& path, const MeasurementVector& y) {
    write_cfi(path, 1, static_cast<std::uint32_t>(y.m), y.data);
}

inline MeasurementVector read_measurement_cfi(const std::filesystem::path& path) {
    const CfiData d = read_cfi(path);
    require(d.rows == 1 && d.cols > 0, "read_measurement_cfi: expected a 1 x m file");
    MeasurementVector y(static_cast<int>(d.cols));
    y.data = d.values;
    return y;
}

inline void write_mask_cfi(const std::filesystem::path& path, const SamplingMask& mask) {
    std::vector<cdouble> bits(mask.retained.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = cdouble(mask.retained[i] ? 1.0 : 0.0, 0.0);
    write_cfi(path, static_cast<std::uint32_t>(mask.n), static_cast<std::uint32_t>(mask.n), bits);
}

inline SamplingMask read_mask_cfi(const std::filesystem::path& path) {
    const CfiData d = read_cfi(path);
    require(d.rows == d.cols && d.rows > 0, "read_mask_cfi: not a square bitmap");
    std::vector<std::uint8_t> bitmap(d.values.size());
    for (std::size_t i = 0; i < bitmap.size(); ++i)
        bitmap[i] = d.values[i].real() > 0.5 ? 1 : 0;
    return make_mask(static_cast<int>(d.rows), std::move(bitmap));
}

// ---------------------------------------------------------------------------
// Rendering: entrywise modulus, [0, 1] mapped linearly to grayscale, values
// beyond 1 shown in red with intensity saturating at 1 + vmax_excess.
// Binary PPM (P6) output, bit-exact for a given image.
// ---------------------------------------------------------------------------

inline void render(const Image& img, const std::filesystem::path& path,
                   std::optional<double> vmax_excess = std::nullopt) {
    double excess = vmax_excess.value_or(0.0);
    if (!vmax_excess) {
        for (cdouble v : img.data) excess = std::max(excess, std::abs(v) - 1.0);
        if (excess <= 0.0) excess = 1.0;
    }
    require(excess > 0.0, "render: vmax_excess must be positive");

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("render: cannot open " + path.string());
    os << "P6\n" << img.n << " " << img.n << "\n255\n";
    std::vector<unsigned char> pixels;
    pixels.reserve(img.data.size() * 3);
    for (cdouble z : img.data) {
        const double v = std::abs(z);
        if (v <= 1.0) {
            const auto g = static_cast<unsigned char>(std::lround(255.0 * v));
            pixels.push_back(g);
            pixels.push_back(g);
            pixels.push_back(g);
        } else {
            const double f = std::min(1.0, (v - 1.0) / excess);
            const auto gb = static_cast<unsigned char>(std::lround(255.0 * (1.0 - f)));
            pixels.push_back(255);
            pixels.push_back(gb);
            pixels.push_back(gb);
        }
    }
    os.write(reinterpret_cast<const char*>(pixels.data()),
             static_cast<std::streamsize>(pixels.size()));
    if (!os) throw std::runtime_error("render: write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// CSV report rows and Table-1-style aggregation.
// ---------------------------------------------------------------------------

/// Full-precision decimal formatting (17 significant digits).
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct AttackCsvRow {
    std::string image_id;
    int lines = 0, m = 0, n = 0;
    double noise_rel = 0, mu1 = 0, mu2 = 0, sigma = 0;
    double e_l2 = 0, r_linf = 0, rho_linf = 0, alpha = 0, wall_time_s = 0;
};

inline constexpr const char* kAttackCsvHeader =
    "image_id,lines,m,n,noise_rel,mu1,mu2,sigma,e_l2,r_linf,rho_linf,alpha,wall_time_s";

inline void append_attack_row(const std::filesystem::path& path, const AttackCsvRow& r) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("append_attack_row: cannot open " + path.string());
    if (fresh) os << kAttackCsvHeader << "\n";
    os << r.image_id << ',' << r.lines << ',' << r.m << ',' << r.n << ',' << fmt_g17(r.noise_rel)
       << ',' << fmt_g17(r.mu1) << ',' << fmt_g17(r.mu2) << ',' << fmt_g17(r.sigma) << ','
       << fmt_g17(r.e_l2) << ',' << fmt_g17(r.r_linf) << ',' << fmt_g17(r.rho_linf) << ','
       << fmt_g17(r.alpha) << ',' << fmt_g17(r.wall_time_s) << "\n";
}

inline std::vector<AttackCsvRow> read_attack_rows(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_attack_rows: cannot open " + path.string());
    std::vector<AttackCsvRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("image_id,", 0) == 0) continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        require(fields.size() == 13, "read_attack_rows: malformed row: " + line);
        AttackCsvRow r;
        r.image_id = fields[0];
        r.lines = std::stoi(fields[1]);
        r.m = std::stoi(fields[2]);
        r.n = std::stoi(fields[3]);
        r.noise_rel = std::stod(fields[4]);
        r.mu1 = std::stod(fields[5]);
        r.mu2 = std::stod(fields[6]);
        r.sigma = std::stod(fields[7]);
        r.e_l2 = std::stod(fields[8]);
        r.r_linf = std::stod(fields[9]);
        r.rho_linf = std::stod(fields[10]);
        r.alpha = std::stod(fields[11]);
        r.wall_time_s = std::stod(fields[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct TableCell {
    int lines = 0;
    double noise_rel = 0;
    int count = 0;
    double alpha_mean = 0, alpha_std = 0;
};

/// Groups rows by (lines, noise_rel) and reports mean and sample standard
/// deviation (zero for singleton groups) of the amplification factor.
inline std::vector<TableCell> aggregate_alpha(const std::vector<AttackCsvRow>& rows) {
    require(!rows.empty(), "aggregate_alpha: no rows");
    std::map<std::pair<int, double>, std::vector<double>> groups;
    for (const AttackCsvRow& r : rows) groups[{r.lines, r.noise_rel}].push_back(r.alpha);
    std::vector<TableCell> cells;
    for (const auto& [key, alphas] : groups) {
        TableCell c;
        c.lines = key.first;
        c.noise_rel = key.second;
        c.count = static_cast<int>(alphas.size());
        double sum = 0;
        for (double a : alphas) sum += a;
        c.alpha_mean = sum / c.count;
        double ss = 0;
        for (double a : alphas) ss += (a - c.alpha_mean) * (a - c.alpha_mean);
        c.alpha_std = c.count > 1 ? std::sqrt(ss / (c.count - 1)) : 0.0;
        cells.push_back(c);
    }
    return cells;
}

inline void write_table_csv(const std::filesystem::path& path,
                            const std::vector<TableCell>& cells) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_table_csv: cannot open " + path.string());
    os << "lines,noise_rel,count,alpha_mean,alpha_std\n";
    for (const TableCell& c : cells)
        os << c.lines << ',' << fmt_g17(c.noise_rel) << ',' << c.count << ','
           << fmt_g17(c.alpha_mean) << ',' << fmt_g17(c.alpha_std) << "\n";
}

/// Markdown pivot: one row per noise level, one column per line count.
inline std::string table_markdown(const std::vector<TableCell>& cells) {
    std::vector<int> line_counts;
    std::vector<double> noise_levels;
    for (const TableCell& c : cells) {
        if (std::find(line_counts.begin(), line_counts.end(), c.lines) == line_counts.end())
            line_counts.push_back(c.lines);
        if (std::find(noise_levels.begin(), noise_levels.end(), c.noise_rel) ==
            noise_levels.end())
            noise_levels.push_back(c.noise_rel);
    }
    std::sort(line_counts.begin(), line_counts.end());
    std::sort(noise_levels.begin(), noise_levels.end());

    std::ostringstream md;
    md << "| noise_rel |";
    for (int l : line_counts) md << " alpha (" << l << " lines) |";
    md << "\n|---|";
    for (std::size_t i = 0; i < line_counts.size(); ++i) md << "---|";
    md << "\n";
    char buf[64];
    for (double nr : noise_levels) {
        std::snprintf(buf, sizeof buf, "| %.4g |", nr);
        md << buf;
        for (int l : line_counts) {
            const auto it = std::find_if(cells.begin(), cells.end(), [&](const TableCell& c) {
                return c.lines == l && c.noise_rel == nr;
            });
            if (it == cells.end()) {
                md << " - |";
            } else {
                std::snprintf(buf, sizeof buf, " %.2f +- %.2f |", it->alpha_mean, it->alpha_std);
                md << buf;
            }
        }
        md << "\n";
    }
    return md.str();
}

// ---------------------------------------------------------------------------
// Experiment manifests: enough metadata to re-run a command bit-identically.
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit content digest, hex-encoded.
inline std::string digest_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("digest_file: cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[8192];
    while (is.read(buf, sizeof buf) || is.gcount() > 0) {
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!is) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

class Manifest {
  public:
    Manifest(std::string command, std::uint64_t seed) {
        j_["schema_version"] = 1;
        j_["command"] = std::move(command);
        j_["seed"] = seed;
        std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j_["created_utc"] = stamp;
        j_["inputs"] = nlohmann::json::object();
        j_["outputs"] = nlohmann::json::object();
    }

    void add_input(const std::filesystem::path& path) {
        j_["inputs"][path.filename().string()] = digest_file(path);
    }

    void add_output(const std::filesystem::path& path) {
        j_["outputs"][path.filename().string()] = digest_file(path);
    }

    void set(const std::string& key, const nlohmann::json& value) { j_[key] = value; }

    void write(const std::filesystem::path& dir) const {
        std::ofstream os(dir / "manifest.json");
        if (!os) throw std::runtime_error("Manifest: cannot write manifest in " + dir.string());
        os << j_.dump(2) << "\n";
    }

    const nlohmann::json& json() const { return j_; }

  private:
    nlohmann::json j_;
};

}  // namespace advmri
