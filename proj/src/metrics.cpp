#include "ftdkf/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "ftdkf/error.hpp"

namespace ftdkf {

namespace {

void append_number(std::string& out, double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.12g", v);
    out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

std::string format_metrics(const std::vector<MetricsRecord>& records) {
    std::string out = kMetricsHeader;
    out += '\n';
    for (const auto& r : records) {
        for (Eigen::Index c = 0; c < r.mse.size(); ++c) {
            out += r.estimator;
            out += ',';
            out += r.run_group;
            out += ',';
            out += std::to_string(r.k);
            out += ',';
            out += std::to_string(c);
            out += ',';
            append_number(out, r.mse(c));
            out += ',';
            if (c < r.fused_mse.size()) append_number(out, r.fused_mse(c));
            out += ',';
            append_number(out, r.min_eig_info);
            out += '\n';
        }
    }
    return out;
}

void emit_metrics(const std::vector<MetricsRecord>& records, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path + " for writing");
    const std::string text = format_metrics(records);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.close();
    if (!f) throw Error("failed writing " + path);
}

}  // namespace ftdkf
