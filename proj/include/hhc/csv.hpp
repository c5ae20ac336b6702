#ifndef HHC_CSV_HPP
#define HHC_CSV_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace hhc {

// Minimal RFC-4180-ish CSV: quoted fields, embedded commas/quotes, header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 when absent
    const std::string& cell(std::size_t row, int col) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// shortest round-trip formatting for doubles in CSV output
std::string format_double(double v);

} // namespace hhc

#endif
