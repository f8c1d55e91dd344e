#include "csilsh/error.hpp"
#include "csilsh/fingerprint_store.hpp"

#include "text.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace csilsh {

void write_dataset_csv(const Dataset& data, std::ostream& out) {
    out << "x,y";
    for (std::size_t i = 0; i < data.dim(); ++i) {
        out << ",f" << i;
    }
    out << '\n';
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto& p = data.position(n);
        out << text::format_double(p.x) << ',' << text::format_double(p.y);
        for (double v : data.fingerprint(n)) {
            out << ',' << text::format_double(v);
        }
        out << '\n';
    }
    if (!out) {
        throw Error(Errc::IoError, "failed writing dataset CSV");
    }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path + " for writing");
    }
    write_dataset_csv(data, out);
}

Dataset read_dataset_csv(std::istream& in, std::size_t expected_dim) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::MalformedCsv, "missing header");
    }
    const auto header = text::split(text::chomp(line), ',');
    if (header.size() < 3 || header[0] != "x" || header[1] != "y") {
        throw Error(Errc::MalformedCsv, "header must be x,y,f0,...");
    }
    const std::size_t dim = header.size() - 2;
    for (std::size_t i = 0; i < dim; ++i) {
        if (header[i + 2] != "f" + std::to_string(i)) {
            throw Error(Errc::MalformedCsv, "header column " + std::to_string(i + 2) + " should be f" +
                                                std::to_string(i));
        }
    }
    if (expected_dim != 0 && dim != expected_dim) {
        throw Error(Errc::MalformedCsv, "header declares " + std::to_string(dim) + " features, expected " +
                                            std::to_string(expected_dim));
    }

    std::vector<double> features;
    std::vector<Position> positions;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto trimmed = text::chomp(line);
        if (trimmed.empty()) {
            continue;
        }
        const auto cols = text::split(trimmed, ',');
        const std::string where = "row " + std::to_string(row);
        if (cols.size() != dim + 2) {
            throw Error(Errc::MalformedCsv, where + " has " + std::to_string(cols.size()) + " columns, expected " +
                                                std::to_string(dim + 2));
        }
        positions.push_back({text::parse_double(cols[0], Errc::MalformedCsv, where),
                             text::parse_double(cols[1], Errc::MalformedCsv, where)});
        for (std::size_t i = 0; i < dim; ++i) {
            features.push_back(text::parse_double(cols[i + 2], Errc::MalformedCsv, where));
        }
    }
    if (positions.empty()) {
        throw Error(Errc::EmptyDataset, "dataset CSV has no rows");
    }
    return Dataset(dim, std::move(features), std::move(positions));
}

Dataset read_dataset_csv(const std::string& path, std::size_t expected_dim) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path);
    }
    return read_dataset_csv(in, expected_dim);
}

} // namespace csilsh
