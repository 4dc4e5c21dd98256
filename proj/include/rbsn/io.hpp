#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rbsn/geometry.hpp"

namespace rbsn {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Throws IoError unless a file can be created at path (the file itself is
/// left untouched when it already exists).
void check_writable(const std::filesystem::path& path);

/// Writes through a temporary sibling file renamed into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

class CsvTable
{
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string tessellation_to_json(const Tessellation& t);
/// Parses and validates a tessellation document. Contacts are re-extracted
/// when the document has none.
Tessellation tessellation_from_json(const std::string& text);

void save_tessellation(const Tessellation& t, const std::filesystem::path& path);
Tessellation load_tessellation(const std::filesystem::path& path);

}  // namespace rbsn
