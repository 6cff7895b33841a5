#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <unistd.h>

namespace arcane {

/// Shortest round-trip representation; stable across runs and platforms.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Row builder: `CsvRow{} << a << b` joins fields with commas.
class CsvRow {
public:
    template <class T>
    CsvRow& operator<<(const T& v) {
        if (!first_) out_ += ',';
        first_ = false;
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, float>)
            out_ += format_double(v);
        else if constexpr (std::is_same_v<T, bool>)
            out_ += v ? "1" : "0";
        else if constexpr (std::is_arithmetic_v<T>)
            out_ += std::to_string(v);
        else
            out_ += std::string_view(v);
        return *this;
    }
    const std::string& str() const noexcept { return out_; }

private:
    std::string out_;
    bool first_ = true;
};

/// Write-temp-then-rename so readers never see a partial file.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename to " + path.string() + ": " + ec.message());
    }
}

}  // namespace arcane
