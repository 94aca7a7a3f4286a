#include "meltsim/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <tbb/parallel_for.h>

#include "meltsim/errors.hpp"
#include "meltsim/units.hpp"

namespace meltsim {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim))
        out.push_back(trim(cell));
    if (!line.empty() && line.back() == delim)
        out.emplace_back();
    return out;
}

std::optional<double> parse_number(const std::string& s)
{
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        return std::nullopt;
    return v;
}

const std::vector<std::string> required_columns = {"material", "power_w",  "speed_mm_s", "depth_um",
                                                   "width_um", "length_um"};

} // namespace

DatasetLoadResult load_dataset(std::istream& in)
{
    DatasetLoadResult result;
    std::string line;
    int line_no = 0;
    std::map<std::string, std::size_t> column;
    char delim = ',';

    // Header: first non-blank, non-comment line.
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        delim = t.find('\t') != std::string::npos ? '\t' : ',';
        const auto names = split(t, delim);
        for (std::size_t i = 0; i < names.size(); ++i)
            column[names[i]] = i;
        for (const auto& req : required_columns)
            if (!column.count(req))
                throw ConfigError("dataset header lacks column '" + req + "'");
        break;
    }
    if (column.empty())
        throw ConfigError("empty dataset");

    std::string last_material;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto cells = split(line, delim);
        auto cell = [&](const std::string& name) -> std::string {
            const auto idx = column.at(name);
            return idx < cells.size() ? cells[idx] : std::string();
        };

        ExperimentRecord r;
        r.line = line_no;
        r.material = cell("material");
        if (r.material.empty())
            r.material = last_material;
        if (column.count("source"))
            r.source = cell("source");

        std::string problem;
        auto number = [&](const char* name, double& dst) {
            if (!problem.empty())
                return;
            const auto v = parse_number(cell(name));
            if (!v)
                problem = std::string("malformed number in column '") + name + "'";
            else
                dst = *v;
        };
        number("power_w", r.power_w);
        number("speed_mm_s", r.speed_mm_s);
        number("depth_um", r.depth_um);
        number("width_um", r.width_um);
        number("length_um", r.length_um);
        if (problem.empty() && r.material.empty())
            problem = "no material given";
        if (problem.empty() && !(r.power_w > 0.0 && r.speed_mm_s > 0.0))
            problem = "power and speed must be positive";
        if (problem.empty() && !(r.depth_um > 0.0 && r.width_um > 0.0 && r.length_um > 0.0))
            problem = "depth, width and length must be positive";

        if (!problem.empty()) {
            result.rejected.push_back({line_no, problem});
            continue;
        }
        last_material = r.material;
        result.records.push_back(std::move(r));
    }
    if (result.records.empty())
        throw ConfigError("empty dataset");
    return result;
}

DatasetLoadResult load_dataset_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open dataset file " + path);
    return load_dataset(in);
}

bool same_material(const std::string& a, const std::string& b)
{
    auto key = [](const std::string& s) {
        std::string k;
        for (unsigned char ch : s)
            if (std::isalnum(ch))
                k.push_back(static_cast<char>(std::tolower(ch)));
        return k;
    };
    return key(a) == key(b);
}

namespace {

double mape(std::vector<double> abs_errors)
{
    if (abs_errors.empty())
        return 0.0;
    // Sorted summation keeps the result independent of record order.
    std::sort(abs_errors.begin(), abs_errors.end());
    double sum = 0.0;
    for (double e : abs_errors)
        sum += e;
    return 100.0 * sum / static_cast<double>(abs_errors.size());
}

} // namespace

ValidationReport score_predictions(const std::vector<ExperimentRecord>& records, const MeltPoolPredictor& predictor)
{
    using Key = std::pair<double, double>;
    std::map<Key, std::size_t> index;
    std::vector<Key> keys;
    for (const auto& r : records) {
        const Key k{r.power_w, r.speed_mm_s};
        if (index.emplace(k, keys.size()).second)
            keys.push_back(k);
    }

    struct Outcome {
        std::optional<MeltPoolDimensions> dims;
        std::string error;
    };
    std::vector<Outcome> outcomes(keys.size());
    tbb::parallel_for(std::size_t{0}, keys.size(), [&](std::size_t i) {
        try {
            outcomes[i].dims = predictor(keys[i].first, keys[i].second);
        } catch (const std::exception& e) {
            outcomes[i].error = e.what();
        }
    });

    ValidationReport rep;
    std::vector<double> el, ew, ed;
    for (const auto& r : records) {
        RecordScore s;
        s.record = r;
        const Outcome& o = outcomes[index.at({r.power_w, r.speed_mm_s})];
        s.prediction = o.dims;
        s.error = o.error;
        if (!s.prediction) {
            ++rep.failures;
        }
        else if (!s.prediction->melted) {
            s.no_melt = true;
            ++rep.no_melt_mispredictions;
        }
        else {
            s.rel_length = (units::m_to_um(s.prediction->length) - r.length_um) / r.length_um;
            s.rel_width = (units::m_to_um(s.prediction->width) - r.width_um) / r.width_um;
            s.rel_depth = (units::m_to_um(s.prediction->depth) - r.depth_um) / r.depth_um;
            el.push_back(std::abs(s.rel_length));
            ew.push_back(std::abs(s.rel_width));
            ed.push_back(std::abs(s.rel_depth));
            ++rep.scored;
        }
        rep.rows.push_back(std::move(s));
    }
    rep.mape_length = mape(el);
    rep.mape_width = mape(ew);
    rep.mape_depth = mape(ed);
    return rep;
}

ValidationReport validate(const std::vector<ExperimentRecord>& records, const SimulationSetup& setup)
{
    std::vector<ExperimentRecord> matching;
    std::vector<ExperimentRecord> foreign;
    for (const auto& r : records)
        (same_material(r.material, setup.material.name) ? matching : foreign).push_back(r);

    ValidationReport rep = score_predictions(matching, [&](double power_w, double speed_mm_s) {
        return simulate_melt_pool(setup, power_w, units::mm_per_s_to_m_per_s(speed_mm_s)).dims;
    });
    for (const auto& r : foreign) {
        RecordScore s;
        s.record = r;
        s.error = "material '" + r.material + "' does not match '" + setup.material.name + "'";
        rep.rows.push_back(std::move(s));
        ++rep.failures;
    }
    std::stable_sort(rep.rows.begin(), rep.rows.end(),
                     [](const RecordScore& x, const RecordScore& y) { return x.record.line < y.record.line; });
    return rep;
}

nlohmann::json ValidationReport::to_json() const
{
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& s : rows) {
        nlohmann::json row = {
            {"line", s.record.line},
            {"material", s.record.material},
            {"source", s.record.source},
            {"power_w", s.record.power_w},
            {"speed_mm_s", s.record.speed_mm_s},
            {"measured_um", {{"length", s.record.length_um}, {"width", s.record.width_um}, {"depth", s.record.depth_um}}},
        };
        if (s.prediction) {
            row["predicted_um"] = {{"length", units::m_to_um(s.prediction->length)},
                                   {"width", units::m_to_um(s.prediction->width)},
                                   {"depth", units::m_to_um(s.prediction->depth)}};
            row["no_melt"] = s.no_melt;
        }
        if (s.scored())
            row["relative_error"] = {{"length", s.rel_length}, {"width", s.rel_width}, {"depth", s.rel_depth}};
        if (!s.error.empty())
            row["error"] = s.error;
        rows_json.push_back(std::move(row));
    }
    return {
        {"records", rows.size()},
        {"scored", scored},
        {"no_melt_mispredictions", no_melt_mispredictions},
        {"failures", failures},
        {"mape_percent", {{"length", mape_length}, {"width", mape_width}, {"depth", mape_depth}}},
        {"rows", std::move(rows_json)},
    };
}

void ValidationReport::write_table(std::ostream& out) const
{
    out << std::fixed << std::setprecision(1);
    out << std::setw(6) << "line" << std::setw(9) << "P[W]" << std::setw(11) << "v[mm/s]" << std::setw(10) << "L_exp"
        << std::setw(10) << "L_pred" << std::setw(10) << "W_exp" << std::setw(10) << "W_pred" << std::setw(10)
        << "D_exp" << std::setw(10) << "D_pred" << "  status\n";
    for (const auto& s : rows) {
        out << std::setw(6) << s.record.line << std::setw(9) << s.record.power_w << std::setw(11) << s.record.speed_mm_s
            << std::setw(10) << s.record.length_um;
        auto pred = [&](double m) {
            if (s.scored())
                out << std::setw(10) << units::m_to_um(m);
            else
                out << std::setw(10) << "-";
        };
        pred(s.prediction ? s.prediction->length : 0.0);
        out << std::setw(10) << s.record.width_um;
        pred(s.prediction ? s.prediction->width : 0.0);
        out << std::setw(10) << s.record.depth_um;
        pred(s.prediction ? s.prediction->depth : 0.0);
        if (!s.error.empty())
            out << "  error: " << s.error;
        else if (s.no_melt)
            out << "  no-melt";
        else
            out << "  ok";
        out << '\n';
    }
    out << std::setprecision(2) << "MAPE %  length " << mape_length << "  width " << mape_width << "  depth "
        << mape_depth << "  (scored " << scored << ", no-melt " << no_melt_mispredictions << ", failed " << failures
        << ")\n";
    out.unsetf(std::ios::floatfield);
}

} // namespace meltsim
