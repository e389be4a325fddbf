#include "fedrun/data/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fedrun::data {

static std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

template <typename T>
static T parse_number(std::string_view s, size_t line_no, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(std::string("non-numeric ") + what + " value '" + std::string(s) + "'",
                         line_no);
    return v;
}

CohortDataset load_embeddings_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_fields(line);
    if (header.size() < 4)
        throw ParseError("header needs site_id,split,<label|ferritin> plus embedding columns", 1);
    if (header[0] != "site_id" || header[1] != "split")
        throw ParseError("header must start with site_id,split", 1);
    bool has_ferritin;
    if (header[2] == "ferritin")
        has_ferritin = true;
    else if (header[2] == "label")
        has_ferritin = false;
    else
        throw ParseError("third column must be 'label' or 'ferritin'", 1);

    size_t dim = header.size() - 3;
    CohortDataset ds;
    ds.dim = dim;

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto f = split_fields(line);
        if (f.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " columns, got " +
                                 std::to_string(f.size()),
                             line_no);

        std::string site(f[0]);
        if (ds.labels.empty())
            ds.site_id = site;
        else if (site != ds.site_id)
            throw ParseError("row belongs to site '" + site + "' but file started with '" +
                                 ds.site_id + "'",
                             line_no);

        Split sp;
        try {
            sp = split_from_name(std::string(f[1]));
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), line_no);
        }

        uint8_t label;
        if (has_ferritin) {
            double fe = parse_number<double>(f[2], line_no, "ferritin");
            if (fe < 0) throw ParseError("negative ferritin", line_no);
            label = static_cast<uint8_t>(label_from_ferritin(fe));
            ds.ferritin.push_back(fe);
        } else {
            int v = parse_number<int>(f[2], line_no, "label");
            if (v != 0 && v != 1) throw ParseError("label must be 0 or 1", line_no);
            label = static_cast<uint8_t>(v);
        }

        size_t base = ds.embeddings.size();
        ds.embeddings.resize(base + dim);
        for (size_t j = 0; j < dim; ++j)
            ds.embeddings[base + j] = parse_number<float>(f[3 + j], line_no, "embedding");
        ds.labels.push_back(label);
        ds.split.push_back(sp);
    }
    if (ds.labels.empty()) throw ParseError("no data rows", line_no);
    ds.validate();
    return ds;
}

void write_cohort_csv(const std::filesystem::path& path, const CohortDataset& dataset) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());

    bool has_ferritin = !dataset.ferritin.empty();
    out << "site_id,split," << (has_ferritin ? "ferritin" : "label");
    for (size_t j = 0; j < dataset.dim; ++j) out << ",e" << j;
    out << '\n';

    char buf[64];
    for (size_t i = 0; i < dataset.n(); ++i) {
        out << dataset.site_id << ',' << split_name(dataset.split[i]) << ',';
        if (has_ferritin) {
            std::snprintf(buf, sizeof buf, "%.10g", dataset.ferritin[i]);
            out << buf;
        } else {
            out << static_cast<int>(dataset.labels[i]);
        }
        const float* row = dataset.row(i);
        for (size_t j = 0; j < dataset.dim; ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[j]));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace fedrun::data
