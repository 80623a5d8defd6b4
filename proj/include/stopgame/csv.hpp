#pragma once

#include "stopgame/errors.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

namespace stopgame::csv {

/// Locale-independent numeric formatting (shortest round-trip form, '.'
/// decimal separator) via std::to_chars.
inline std::string format(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Minimal CSV writer: fixed header, fixed column order, one row at a time.
class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_)
            throw Error(Errc::bad_config, "cannot open output file: " + path);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
        columns_ = header.size();
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_)
            throw Error(Errc::bad_config, "csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t columns_{0};
};

} // namespace stopgame::csv
