#include "glassfx/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "glassfx/errors.hpp"
#include "glassfx/numeric.hpp"

namespace glassfx::io {

namespace {

constexpr const char* kModule = "io";

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        pos = eol + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

double field_double(std::string_view s, std::size_t row) {
    double v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v), kModule,
            "bad numeric field at row " + std::to_string(row));
    return v;
}

std::int64_t field_int(std::string_view s, std::size_t row) {
    std::int64_t v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size(), kModule,
            "bad integer field at row " + std::to_string(row));
    return v;
}

} // namespace

std::string curve_csv(const obs::Curve& curve) {
    std::string out = "lag,value,count\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out += format_g17(curve.lags_seconds[i] / 60.0);
        out += ',';
        out += format_g17(curve.values[i]);
        out += ',';
        out += std::to_string(curve.counts[i]);
        out += '\n';
    }
    return out;
}

obs::Curve parse_curve_csv(std::string_view text) {
    const auto lines = split_lines(text);
    require(!lines.empty() && lines[0] == "lag,value,count", kModule,
            "curve table must start with 'lag,value,count'");
    obs::Curve curve;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split_fields(lines[r]);
        require(f.size() == 3, kModule, "curve row " + std::to_string(r + 1) +
                                            " must have three fields");
        curve.lags_seconds.push_back(field_double(f[0], r + 1) * 60.0);
        curve.values.push_back(field_double(f[1], r + 1));
        curve.counts.push_back(field_int(f[2], r + 1));
    }
    curve.validate();
    return curve;
}

std::string distribution_csv(const obs::Distribution& dist) {
    std::string out = "x,y,n\n";
    for (std::size_t i = 0; i < dist.abscissae.size(); ++i) {
        out += format_g17(dist.abscissae[i]);
        out += ',';
        out += format_g17(dist.ordinates[i]);
        out += ',';
        out += std::to_string(dist.n_samples);
        out += '\n';
    }
    return out;
}

obs::Distribution parse_distribution_csv(std::string_view text, obs::DistKind kind,
                                         double lag_minutes) {
    const auto lines = split_lines(text);
    require(!lines.empty() && lines[0] == "x,y,n", kModule,
            "distribution table must start with 'x,y,n'");
    obs::Distribution dist;
    dist.kind = kind;
    dist.lag_seconds = lag_minutes * 60.0;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split_fields(lines[r]);
        require(f.size() == 3, kModule, "distribution row " + std::to_string(r + 1) +
                                            " must have three fields");
        dist.abscissae.push_back(field_double(f[0], r + 1));
        dist.ordinates.push_back(field_double(f[1], r + 1));
        dist.n_samples = field_int(f[2], r + 1);
    }
    require(!dist.abscissae.empty(), kModule, "distribution table has no rows");
    return dist;
}

std::string series_csv(const market::PriceSeries& series) {
    std::string out = "time,price\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(series.epoch_times[i]);
        out += ',';
        out += format_g17(series.prices[i]);
        out += '\n';
    }
    return out;
}

std::string fit_result_json(const fit::FitResult& result) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json values;
    for (const auto& [name, value] : result.values) values[name] = value;
    j["values"] = values;
    j["frozen"] = result.frozen;
    j["residual"] = result.residual;
    j["n_iter"] = result.n_iter;
    j["converged"] = result.converged;
    return j.dump(2) + "\n";
}

std::string sqt_fit_json(const fit::SqtFitForm& form) {
    nlohmann::ordered_json j;
    j["form"] = form.form == fit::SqtForm::single ? "single" : "double";
    nlohmann::ordered_json values;
    if (form.form == fit::SqtForm::single) {
        values["tau0"] = form.tau0;
        values["p"] = form.p;
    } else {
        values["A1"] = form.A1;
        values["tau_alpha"] = form.tau_alpha;
        values["alpha"] = form.alpha;
        values["tau_beta"] = form.tau_beta;
        values["beta"] = form.beta;
    }
    j["values"] = values;
    j["residual"] = form.residual;
    j["n_iter"] = form.n_iter;
    j["converged"] = form.converged;
    if (form.form == fit::SqtForm::double_exp)
        j["effectively_single"] = form.effectively_single;
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), kModule, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        require(out.good(), kModule, "failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, kModule, "failed renaming " + tmp.string() + " to " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), kModule, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    require(in.good() || in.eof(), kModule, "failed reading " + path.string());
    return buf.str();
}

} // namespace glassfx::io
