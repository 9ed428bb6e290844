#ifndef TIPP_PATH_IO_HPP
#define TIPP_PATH_IO_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "fields.hpp"
#include "transect.hpp"

namespace tipp {

// Path file: one line per column holding its sorted, comma-separated row
// indices; lines starting with '#' are comments.

inline void write_path(std::ostream& os, const Path& path) {
    for (const auto& a : path.actions) {
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            if (i > 0) os << ',';
            os << a.rows[i];
        }
        os << '\n';
    }
}

inline Path read_path(std::istream& is, std::string_view source = "<path>") {
    Path out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        StageAction a;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = std::min(text.find(',', pos), text.size());
            const int row = detail::parse_number<int>(text.substr(pos, comma - pos), source, line_no, pos + 1);
            if (!a.rows.empty() && row <= a.rows.back())
                detail::parse_fail(source, line_no, pos + 1, "row indices must be strictly increasing");
            if (row < 1) detail::parse_fail(source, line_no, pos + 1, "row indices are 1-based");
            a.rows.push_back(row);
            if (comma == text.size()) break;
            pos = comma + 1;
        }
        if (!out.actions.empty() && a.size() != out.robots())
            detail::parse_fail(source, line_no, 1, "inconsistent robot count");
        out.actions.push_back(std::move(a));
    }
    return out;
}

inline Path load_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    return read_path(in, path);
}

inline void save_path(const std::string& path, const Path& p) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    write_path(out, p);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

} // namespace tipp

#endif
