#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace wpnav {

// Minimal CSV writer with deterministic number formatting.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot write " + path);
        out_ << header << "\n";
    }

    CsvWriter& field(const std::string& v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter& field(long long v) {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        sep();
        out_ << buf;
        return *this;
    }
    void end_row() {
        out_ << "\n";
        out_.flush();  // rows land immediately so long runs can be monitored
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

}  // namespace wpnav
