#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meltsim/meltpool.hpp"
#include "meltsim/simulation.hpp"

namespace meltsim {

/// One measured melt pool, in the units of the published tables.
struct ExperimentRecord {
    std::string material;
    double power_w = 0.0;
    double speed_mm_s = 0.0;
    double depth_um = 0.0;
    double width_um = 0.0;
    double length_um = 0.0;
    std::string source;
    int line = 0; // 1-based line in the input
};

struct RowDiagnostic {
    int line = 0;
    std::string message;
};

struct DatasetLoadResult {
    std::vector<ExperimentRecord> records;
    std::vector<RowDiagnostic> rejected;
};

/// Reads a comma- or tab-delimited table with header
/// material,power_w,speed_mm_s,depth_um,width_um,length_um,source.
/// Blank material cells inherit the previous row's material. Bad rows are
/// reported and skipped; a table without any valid row is a ConfigError.
DatasetLoadResult load_dataset(std::istream& in);
DatasetLoadResult load_dataset_file(const std::string& path);

struct RecordScore {
    ExperimentRecord record;
    std::optional<MeltPoolDimensions> prediction;
    std::string error;
    bool no_melt = false;
    // (predicted - measured) / measured
    double rel_length = 0.0;
    double rel_width = 0.0;
    double rel_depth = 0.0;

    bool scored() const { return prediction && !no_melt; }
};

struct ValidationReport {
    std::vector<RecordScore> rows;
    double mape_length = 0.0; // percent
    double mape_width = 0.0;
    double mape_depth = 0.0;
    int scored = 0;
    int no_melt_mispredictions = 0;
    int failures = 0;

    nlohmann::json to_json() const;
    void write_table(std::ostream& out) const;
};

/// Predicts dimensions for (power W, speed mm/s).
using MeltPoolPredictor = std::function<MeltPoolDimensions(double power_w, double speed_mm_s)>;

/// Scores each record against the predictor, simulating every distinct
/// (power, speed) once. No-melt predictions are flagged and left out of the
/// MAPE; predictor exceptions are recorded per row.
ValidationReport score_predictions(const std::vector<ExperimentRecord>& records, const MeltPoolPredictor& predictor);

/// score_predictions with the thermal model of `setup`; rows whose material
/// does not match setup.material are reported as errors.
ValidationReport validate(const std::vector<ExperimentRecord>& records, const SimulationSetup& setup);

/// Case- and punctuation-insensitive material name comparison.
bool same_material(const std::string& a, const std::string& b);

} // namespace meltsim
