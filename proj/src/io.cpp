#include "displab/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "displab/error.hpp"

namespace displab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string map_csv(const PropertyMap& map) {
    const bool two_d = map.kind == PropertyMap::Kind::map2d;
    std::string out = two_d ? "kxhx,kyhy,gmag,phase_ratio,vgx_ratio,vgy_ratio,singular\n"
                            : "nc,kh,gmag,phase_ratio,vg_ratio,singular\n";
    out.reserve(out.size() + map.cells() * 96);
    for (std::size_t i = 0; i < map.axis1.size(); ++i) {
        for (std::size_t j = 0; j < map.axis2.size(); ++j) {
            const std::size_t c = map.index(i, j);
            out += format_double(map.axis1[i]);
            out += ',';
            out += format_double(map.axis2[j]);
            out += ',';
            out += format_double(map.gmag[c]);
            out += ',';
            out += format_double(map.phase_ratio[c]);
            out += ',';
            out += format_double(map.vgx_ratio[c]);
            if (two_d) {
                out += ',';
                out += format_double(map.vgy_ratio[c]);
            }
            out += map.singular[c] ? ",1\n" : ",0\n";
        }
    }
    return out;
}

std::string field_csv(const SolutionField& field) {
    std::string out = field.dim == 2 ? "x,y,u\n" : "x,u\n";
    for (std::size_t r = 0; r < field.extent_y(); ++r) {
        for (std::size_t s = 0; s < field.extent_x(); ++s) {
            out += format_double(field.x_at(s));
            out += ',';
            if (field.dim == 2) {
                out += format_double(field.y_at(r));
                out += ',';
            }
            out += format_double(field.at(s, r));
            out += '\n';
        }
    }
    return out;
}

std::string table_csv(const std::vector<ErrorReport>& rows) {
    std::string out = "N,linf_error,rate\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.linf_error);
        out += ',';
        if (r.rate) out += format_double(*r.rate);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace displab
