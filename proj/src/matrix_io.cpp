#include "radiomap/matrix_io.hpp"
#include "radiomap/experiment.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace radiomap {

namespace {

int read_size_header(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# N=", 0) != 0)
        throw ConfigError("expected a `# N=<n>` header line");
    const char *b = line.data() + 4;
    const char *e = line.data() + line.size();
    while (e > b && (e[-1] == '\r' || e[-1] == ' '))
        --e;
    int n = 0;
    const auto res = std::from_chars(b, e, n);
    if (res.ec != std::errc{} || res.ptr != e || n < 1)
        throw ConfigError("invalid grid size in header '" + line + "'");
    return n;
}

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        while (!field.empty() && field.front() == ' ')
            field.erase(field.begin());
        out.push_back(field);
    }
    return out;
}

template <class T> T to_number(const std::string &s) {
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError("invalid number '" + s + "'");
    return value;
}

} // namespace

void write_matrix_csv(std::ostream &os, const Matrix &m) {
    os << "# N=" << m.rows() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                os << ',';
            os << format_double(m(i, j));
        }
        os << '\n';
    }
}

Matrix read_matrix_csv(std::istream &is) {
    const int n = read_size_header(is);
    Matrix m(n, n);
    std::string line;
    for (int i = 0; i < n; ++i) {
        if (!std::getline(is, line))
            throw ConfigError("matrix file ends after " + std::to_string(i) + " rows");
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != n)
            throw ConfigError("matrix row " + std::to_string(i) + " has " +
                              std::to_string(fields.size()) + " columns, expected " +
                              std::to_string(n));
        for (int j = 0; j < n; ++j)
            m(i, j) = to_number<double>(fields[j]);
    }
    return m;
}

void write_samples_csv(std::ostream &os, const SampleSet &samples) {
    os << "# N=" << samples.grid_size() << '\n';
    os << "row,col,value,origin\n";
    for (const auto &s : samples)
        os << s.cell.row << ',' << s.cell.col << ',' << format_double(s.value) << ','
           << to_string(s.origin) << '\n';
}

SampleSet read_samples_csv(std::istream &is) {
    const int n = read_size_header(is);
    std::string line;
    if (!std::getline(is, line) || split_fields(line) !=
                                       std::vector<std::string>{"row", "col", "value", "origin"})
        throw ConfigError("expected a `row,col,value,origin` header");
    SampleSet out(n);
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r")
            continue;
        const auto f = split_fields(line);
        if (f.size() != 4)
            throw ConfigError("sample line needs 4 fields: '" + line + "'");
        out.add({{to_number<int>(f[0]), to_number<int>(f[1])}, to_number<double>(f[2]),
                 origin_from_string(f[3])});
    }
    return out;
}

Matrix load_matrix_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open matrix file '" + path + "'");
    return read_matrix_csv(in);
}

SampleSet load_samples_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open samples file '" + path + "'");
    return read_samples_csv(in);
}

} // namespace radiomap
