#include "acx/gnn/weight_file.hpp"

#include <functional>
#include <sstream>

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"

namespace acx::gnn {

std::string format_weight_file(const WeightFile& f) {
    std::ostringstream out;
    out << "acx-gnn v1 " << f.tag << ' ' << (f.widths.empty() ? 0 : f.widths.size() - 1) << ' ';
    for (std::size_t i = 0; i < f.widths.size(); ++i) out << (i ? "," : "") << f.widths[i];
    out << ' ' << f.classes << '\n';
    for (const auto& [k, v] : f.meta) out << "# " << k << ' ' << v << '\n';
    for (const auto& m : f.matrices) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? " " : "") << text::exact(m(r, c));
            out << '\n';
        }
    }
    return out.str();
}

WeightFile parse_weight_file(std::string_view body, const std::function<ShapeList(const WeightFile&)>& shapes) {
    auto lines = text::split(body, '\n');
    std::size_t pos = 0;
    auto next_line = [&]() -> std::string_view {
        while (pos < lines.size()) {
            const auto l = text::trim(lines[pos++]);
            if (!l.empty()) return l;
        }
        throw FormatError("weight file: truncated at line " + std::to_string(pos));
    };

    WeightFile f;
    const auto header = text::split(next_line(), ' ');
    if (header.size() < 2 || header[0] != "acx-gnn") throw FormatError("weight file: missing acx-gnn header");
    if (header[1] != "v1") throw VersionError("weight file: unsupported version '" + std::string(header[1]) + "'");
    if (header.size() != 6) throw FormatError("weight file: malformed header");
    f.tag = std::string(header[2]);
    const auto layers = text::parse_int(header[3]);
    const auto classes = text::parse_int(header[5]);
    if (!layers || !classes || *layers < 0 || *classes < 0) throw FormatError("weight file: malformed header");
    for (auto w : text::split(header[4], ',')) {
        const auto v = text::parse_int(w);
        if (!v || *v < 0) throw FormatError("weight file: malformed widths");
        f.widths.push_back(static_cast<std::size_t>(*v));
    }
    if (f.widths.size() != static_cast<std::size_t>(*layers) + 1) throw FormatError("weight file: layer count disagrees with widths");
    f.classes = static_cast<std::size_t>(*classes);

    while (pos < lines.size() && text::trim(lines[pos]).starts_with("#")) {
        const auto l = text::trim(text::trim(lines[pos++]).substr(1));
        const auto sp = l.find(' ');
        f.meta[std::string(l.substr(0, sp))] = sp == std::string_view::npos ? "" : std::string(text::trim(l.substr(sp)));
    }

    for (const auto& [rows, cols] : shapes(f)) {
        Matrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto fields = text::split(next_line(), ' ');
            if (fields.size() != cols) {
                throw FormatError("weight file: line " + std::to_string(pos) + " has " + std::to_string(fields.size()) +
                                  " values, expected " + std::to_string(cols));
            }
            for (std::size_t c = 0; c < cols; ++c) {
                const auto v = text::parse_double(fields[c]);
                if (!v) throw FormatError("weight file: bad number on line " + std::to_string(pos));
                m(r, c) = *v;
            }
        }
        f.matrices.push_back(std::move(m));
    }
    while (pos < lines.size()) {
        if (!text::trim(lines[pos++]).empty()) throw FormatError("weight file: trailing data at line " + std::to_string(pos));
    }
    return f;
}

void write_weight_file(const std::filesystem::path& path, const WeightFile& f) {
    text::write_file_atomic(path, format_weight_file(f));
}

WeightFile read_weight_file(const std::filesystem::path& path, const std::function<ShapeList(const WeightFile&)>& shapes) {
    return parse_weight_file(text::read_file(path), shapes);
}

} // namespace acx::gnn
