#include "qhlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qhlab/errors.hpp"

namespace qhlab {

std::string fmt_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::cell(double x) { return cell(fmt_real(x)); }
CsvTable& CsvTable::cell(long long x) { return cell(std::to_string(x)); }
CsvTable& CsvTable::cell(bool b) { return cell(std::string(b ? "true" : "false")); }

CsvTable& CsvTable::cell(const std::string& s) {
    if (s.find_first_of(",\"\n") != std::string::npos) throw DomainError("csv cell needs quoting: " + s);
    if (pending_ > 0) body_ += ',';
    body_ += s;
    ++pending_;
    return *this;
}

void CsvTable::end_row() {
    if (pending_ != header_.size())
        throw DomainError("csv row has " + std::to_string(pending_) + " cells, header has " +
                          std::to_string(header_.size()));
    body_ += '\n';
    pending_ = 0;
    ++rows_;
}

std::string CsvTable::str() const {
    std::string s;
    for (std::size_t i = 0; i < header_.size(); ++i) s += (i ? "," : "") + header_[i];
    s += '\n';
    return s + body_;
}

void CsvTable::write(const std::filesystem::path& p) const {
    if (pending_ != 0) throw DomainError("csv table has an unfinished row");
    std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw NumericError("cannot open " + p.string() + " for writing");
    os << str();
    if (!os) throw NumericError("write failed: " + p.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace qhlab
