#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "armchair/errors.hpp"

namespace armchair::csv {

inline std::string format_double(double v, int sig_digits = 15) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, v);
    return buf;
}

/// Deterministic CSV sink: '#'-prefixed metadata lines, fixed column order,
/// no timestamps. Tracks the path so a failed run can remove its output.
class Writer {
public:
    Writer(std::string path, int sig_digits) : path_(std::move(path)), sig_(sig_digits) {
        out_.open(path_);
        if (!out_) throw UsageError("cannot open output file: " + path_);
    }

    const std::string& path() const { return path_; }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    void raw(const std::string& line) { out_ << line << "\n"; }

    class Row {
    public:
        explicit Row(Writer& w) : w_(w) {}
        Row& operator<<(double v) {
            sep();
            w_.out_ << format_double(v, w_.sig_);
            return *this;
        }
        Row& operator<<(int v) {
            sep();
            w_.out_ << v;
            return *this;
        }
        Row& operator<<(const std::string& v) {
            sep();
            w_.out_ << v;
            return *this;
        }
        Row& operator<<(const char* v) {
            sep();
            w_.out_ << v;
            return *this;
        }
        ~Row() { w_.out_ << "\n"; }

    private:
        void sep() {
            if (started_) w_.out_ << ",";
            started_ = true;
        }
        Writer& w_;
        bool started_ = false;
    };

    Row row() { return Row(*this); }

private:
    std::string path_;
    std::ofstream out_;
    int sig_;
};

/// Collects every file a run writes; on failure the partial outputs go away.
class OutputSet {
public:
    Writer& open(const std::string& path, int sig_digits) {
        writers_.push_back(std::make_unique<Writer>(path, sig_digits));
        return *writers_.back();
    }
    void discard_all() {
        for (auto& w : writers_) {
            std::error_code ec;
            std::filesystem::remove(w->path(), ec);
        }
    }

private:
    std::vector<std::unique_ptr<Writer>> writers_;
};

} // namespace armchair::csv
