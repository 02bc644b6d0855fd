#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace qhlab {

// Shortest form is not used: every double gets 17 significant digits, which round-trips.
std::string fmt_real(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& cell(double x);
    CsvTable& cell(long long x);
    CsvTable& cell(int x) { return cell(static_cast<long long>(x)); }
    CsvTable& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
    CsvTable& cell(bool b);
    CsvTable& cell(const std::string& s);
    CsvTable& cell(const char* s) { return cell(std::string(s)); }
    // Ends the current row; throws if the cell count does not match the header.
    void end_row();

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_; }
    std::string str() const;
    void write(const std::filesystem::path& p) const;

private:
    std::vector<std::string> header_;
    std::string body_;
    std::size_t pending_ = 0;
    std::size_t rows_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace qhlab
