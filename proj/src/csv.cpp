#include "squeezecav/errors.hpp"
#include "squeezecav/scenario.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <fstream>

namespace squeezecav {

std::string format_label(double value) {
    if (std::isfinite(value) && value == std::round(value) && std::abs(value) < 1e15)
        return fmt::format("{:.1f}", value);
    return fmt::format("{}", value);
}

void FigureDataset::validate() const {
    if (columns.empty())
        throw Error(ErrorKind::Invariant, "dataset '" + figure_id + "' has no columns");
    const std::size_t n = columns.front().values.size();
    if (n == 0)
        throw Error(ErrorKind::Invariant, "dataset '" + figure_id + "' has empty columns");
    for (const auto &col : columns) {
        if (col.values.size() != n)
            throw Error(ErrorKind::Invariant,
                        "dataset '" + figure_id + "': column '" + col.name + "' length differs");
        if (col.name.empty())
            throw Error(ErrorKind::Invariant, "dataset '" + figure_id + "' has an unnamed column");
        for (char c : col.name)
            if (std::tolower(static_cast<unsigned char>(c)) != c || c == ',')
                throw Error(ErrorKind::Invariant, "column name '" + col.name + "' is not a lowercase label");
    }
}

std::filesystem::path emit_csv(const FigureDataset &dataset, const std::filesystem::path &output_dir) {
    dataset.validate();
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create directory " + output_dir.string() + ": " + ec.message());

    const auto path = output_dir / (dataset.figure_id + ".csv");
    std::string text;
    for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
        if (c)
            text += ',';
        text += dataset.columns[c].name;
    }
    text += '\n';
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
        for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
            if (c)
                text += ',';
            const double v = dataset.columns[c].values[r];
            text += std::isnan(v) ? std::string("nan") : fmt::format("{:.17g}", v);
        }
        text += '\n';
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw Error(ErrorKind::Io, "write failed for " + path.string());
    return path;
}

} // namespace squeezecav
