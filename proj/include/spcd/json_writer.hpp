#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spcd/format.hpp"

namespace spcd {

// Minimal deterministic JSON emitter: keys appear in insertion order and
// numbers use the same %.17g form everywhere, so identical results are
// byte-identical files. Nesting is managed by the caller via open/close;
// commas are inferred from what was last written.
class JsonWriter {
  public:
    const std::string& str() const { return out_; }

    void begin_object() {
        sep();
        out_ += '{';
    }
    void end_object() { out_ += '}'; }
    void begin_array() {
        sep();
        out_ += '[';
    }
    void end_array() { out_ += ']'; }

    void key(const std::string& k) {
        sep();
        append_string(k);
        out_ += ':';
    }

    void value(double v) {
        sep();
        if (std::isnan(v))
            out_ += "null";
        else if (std::isinf(v))
            out_ += v > 0 ? "\"inf\"" : "\"-inf\"";
        else
            out_ += format_g17(v);
    }
    void value(int v) {
        sep();
        out_ += std::to_string(v);
    }
    void value(long long v) {
        sep();
        out_ += std::to_string(v);
    }
    void value(unsigned long long v) {
        sep();
        out_ += std::to_string(v);
    }
    void value(bool v) {
        sep();
        out_ += v ? "true" : "false";
    }
    void value(const std::string& v) {
        sep();
        append_string(v);
    }
    void value(const char* v) { value(std::string(v)); }

    // Appends a pre-serialized JSON fragment in value position.
    void raw(const std::string& json) {
        sep();
        out_ += json;
    }

    template <class T>
    void kv(const std::string& k, const T& v) {
        key(k);
        value(v);
    }
    void array(const std::string& k, const std::vector<double>& vs) {
        key(k);
        begin_array();
        for (double v : vs) value(v);
        end_array();
    }

  private:
    // A separator is due exactly when the previous token was a completed
    // value or a key-less position: i.e. the last char is not an opener or
    // a key's colon.
    void sep() {
        if (out_.empty()) return;
        char c = out_.back();
        if (c != '{' && c != '[' && c != ':') out_ += ',';
    }
    void append_string(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
};

}  // namespace spcd
