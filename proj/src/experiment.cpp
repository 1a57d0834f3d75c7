// Copyright (c) zonoridge contributors.
// SPDX-License-Identifier: Apache-2.0
#include "zonoridge/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "parallel.hpp"

namespace zonoridge {

namespace {

using Json = nlohmann::json;
using Cell = CsvWriter::Cell;
using Row = std::vector<Cell>;

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> splitList(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trimmed(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
T parseNumber(const std::string& key, const std::string& text) {
    T value{};
    const std::string t = trimmed(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
    }
    return value;
}

template <typename T>
std::vector<T> parseNumbers(const std::string& key, const std::string& text) {
    std::vector<T> out;
    for (const auto& item : splitList(text)) {
        out.push_back(parseNumber<T>(key, item));
    }
    return out;
}

bool parseBool(const std::string& key, const std::string& text) {
    const std::string t = trimmed(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw ConfigError("'" + key + "': expected true or false, got '" + text + "'");
}

template <typename E>
E parseEnum(const std::string& key, const std::string& text, const std::map<std::string, E>& names) {
    const auto it = names.find(trimmed(text));
    if (it == names.end()) {
        std::string allowed;
        for (const auto& [name, v] : names) {
            allowed += (allowed.empty() ? "" : ", ") + name;
        }
        throw ConfigError("'" + key + "': unknown value '" + text + "' (allowed: " + allowed + ")");
    }
    return it->second;
}

const std::map<std::string, UncertaintyTarget> kTargets{
    {"labels", UncertaintyTarget::Labels}, {"features", UncertaintyTarget::Features}, {"both", UncertaintyTarget::Both}};
const std::map<std::string, TransformKind> kTransforms{{"svd", TransformKind::SvdOfCovariance},
                                                       {"identity", TransformKind::Identity}};
const std::map<std::string, LossFormula> kLosses{{"ridge", LossFormula::Ridge}, {"mse", LossFormula::Mse}};
const std::map<std::string, WorldStrategy> kStrategies{{"corner", WorldStrategy::Corner},
                                                       {"grid", WorldStrategy::Grid}};

template <typename E>
std::string enumName(E value, const std::map<std::string, E>& names) {
    for (const auto& [name, v] : names) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"data.path", [](auto& c, auto&, auto& v) { c.dataPath = trimmed(v); }},
        {"data.label", [](auto& c, auto&, auto& v) { c.label = trimmed(v); }},
        {"data.features", [](auto& c, auto&, auto& v) { c.features = splitList(v); }},
        {"data.split_ratio", [](auto& c, auto& k, auto& v) { c.splitRatio = parseNumber<double>(k, v); }},
        {"data.drop_missing", [](auto& c, auto& k, auto& v) { c.dropMissing = parseBool(k, v); }},
        {"data.synthetic_rows", [](auto& c, auto& k, auto& v) { c.syntheticRows = parseNumber<Eigen::Index>(k, v); }},
        {"data.synthetic_features",
         [](auto& c, auto& k, auto& v) { c.syntheticFeatures = parseNumber<Eigen::Index>(k, v); }},
        {"data.synthetic_noise", [](auto& c, auto& k, auto& v) { c.syntheticNoise = parseNumber<double>(k, v); }},
        {"data.synthetic_seed", [](auto& c, auto& k, auto& v) { c.syntheticSeed = parseNumber<std::uint64_t>(k, v); }},
        {"uncertainty.target", [](auto& c, auto& k, auto& v) { c.target = parseEnum(k, v, kTargets); }},
        {"uncertainty.columns", [](auto& c, auto&, auto& v) { c.uncertainColumns = splitList(v); }},
        {"uncertainty.percentage", [](auto& c, auto& k, auto& v) { c.percentage = parseNumber<double>(k, v); }},
        {"uncertainty.radius", [](auto& c, auto& k, auto& v) { c.radius = parseNumber<double>(k, v); }},
        {"model.lambda", [](auto& c, auto& k, auto& v) { c.lambda = parseNumber<double>(k, v); }},
        {"model.transform", [](auto& c, auto& k, auto& v) { c.transform = parseEnum(k, v, kTransforms); }},
        {"model.split_budget", [](auto& c, auto& k, auto& v) { c.splitBudget = parseNumber<std::size_t>(k, v); }},
        {"model.parallel", [](auto& c, auto& k, auto& v) { c.parallel = parseBool(k, v); }},
        {"report.threshold", [](auto& c, auto& k, auto& v) { c.threshold = parseNumber<double>(k, v); }},
        {"report.loss", [](auto& c, auto& k, auto& v) { c.lossFormula = parseEnum(k, v, kLosses); }},
        {"report.out_dir", [](auto& c, auto&, auto& v) { c.outDir = trimmed(v); }},
        {"report.format", [](auto& c, auto&, auto& v) { c.format = trimmed(v); }},
        {"sweep.radius", [](auto& c, auto& k, auto& v) { c.radii = parseNumbers<double>(k, v); }},
        {"sweep.percentage", [](auto& c, auto& k, auto& v) { c.percentages = parseNumbers<double>(k, v); }},
        {"sweep.lambda", [](auto& c, auto& k, auto& v) { c.lambdas = parseNumbers<double>(k, v); }},
        {"sweep.seeds", [](auto& c, auto& k, auto& v) { c.seeds = parseNumbers<std::uint64_t>(k, v); }},
        {"oracle.samples", [](auto& c, auto& k, auto& v) { c.samples = parseNumber<std::size_t>(k, v); }},
        {"oracle.strategy", [](auto& c, auto& k, auto& v) { c.strategy = parseEnum(k, v, kStrategies); }},
        {"oracle.grid_levels", [](auto& c, auto& k, auto& v) { c.gridLevels = parseNumber<int>(k, v); }},
        {"oracle.budget", [](auto& c, auto& k, auto& v) { c.oracleBudget = parseNumber<std::size_t>(k, v); }},
        {"oracle.k_scale", [](auto& c, auto& k, auto& v) { c.kScale = parseNumber<double>(k, v); }},
    };
    return table;
}

std::string joinNumbers(const auto& values) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) {
            out += ',';
        }
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
            out += formatNumber(v);
        } else {
            out += std::to_string(v);
        }
    }
    return out;
}

std::string joinStrings(const std::vector<std::string>& values) {
    std::string out;
    for (const auto& v : values) {
        out += (out.empty() ? "" : ",") + v;
    }
    return out;
}

// Shared experiment plumbing.

struct Prepared {
    Dataset data;
    double labelRange = 0.0;
    std::vector<Eigen::Index> uncertainColumns;
};

Prepared prepare(const ExperimentConfig& config) {
    config.validate();
    Prepared p;
    if (config.dataPath.empty()) {
        p.data = syntheticDataset(config.syntheticRows, config.syntheticFeatures, config.syntheticNoise,
                                  config.syntheticSeed);
    } else {
        p.data = loadCsv(config.dataPath, config.label, config.features);
    }
    if (p.data.hasMissing()) {
        if (!config.dropMissing) {
            throw DataError("dataset has missing cells; set data.drop_missing = true or declare ranges");
        }
        std::vector<Eigen::Index> keep;
        for (Eigen::Index r = 0; r < p.data.n(); ++r) {
            if (!p.data.X.row(r).hasNaN() && !std::isnan(p.data.y[r])) {
                keep.push_back(r);
            }
        }
        if (keep.empty()) {
            throw EmptyData();
        }
        p.data = p.data.rows(keep);
    }
    p.labelRange = domainRanges(p.data).labelRange();
    if (config.target != UncertaintyTarget::Labels) {
        if (config.uncertainColumns.empty()) {
            for (Eigen::Index c = 1; c < p.data.d(); ++c) {
                p.uncertainColumns.push_back(c);
            }
        }
        for (const auto& name : config.uncertainColumns) {
            const auto it = std::find(p.data.columns.begin() + 1, p.data.columns.end(), name);
            if (it == p.data.columns.end()) {
                throw ConfigError("uncertainty.columns: unknown feature '" + name + "'");
            }
            p.uncertainColumns.push_back(it - p.data.columns.begin());
        }
    }
    return p;
}

struct GridPoint {
    double radius;
    double percentage;
    double lambda;
};

std::vector<GridPoint> grid(const ExperimentConfig& config) {
    std::vector<GridPoint> out;
    for (double r : config.radiusGrid()) {
        for (double p : config.percentageGrid()) {
            for (double l : config.lambdaGrid()) {
                out.push_back({r, p, l});
            }
        }
    }
    return out;
}

struct Trial {
    Dataset train;
    Dataset test;
    AbstractDataset data;
};

Trial makeTrial(const Prepared& p, const ExperimentConfig& config, const GridPoint& g, std::uint64_t seed) {
    Trial t;
    std::tie(t.train, t.test) = trainTestSplit(p.data, config.splitRatio, seed);
    UncertaintySpec spec;
    spec.target = config.target;
    spec.columns = p.uncertainColumns;
    spec.percentage = g.percentage;
    spec.radius = g.radius;
    // Independent stream from the split.
    spec.seed = seed ^ 0x9e3779b97f4a7c15ULL;
    t.data = injectUncertainty(t.train, spec);
    return t;
}

RidgeConfig ridgeConfig(const ExperimentConfig& config, double lambda) {
    RidgeConfig cfg;
    cfg.lambda = lambda;
    cfg.transform = config.transform;
    cfg.splitBudget = config.splitBudget;
    cfg.parallel = false;
    return cfg;
}

Row gridCells(const GridPoint& g) { return {g.radius, g.percentage, g.lambda}; }

Row diagnosticCells(const FixedPointDiagnostics& d) {
    return {d.beta, static_cast<std::int64_t>(d.splitsUsed), d.residual.realResidual, d.residual.dataResidual,
            d.residual.boxResidual};
}

const std::vector<std::string> kGridHeader{"radius", "percentage", "lambda"};
const std::vector<std::string> kDiagHeader{"beta", "splits", "residual_real", "residual_data", "residual_box"};

std::vector<std::string> concat(std::initializer_list<std::vector<std::string>> parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

Row concatRow(std::initializer_list<Row> parts) {
    Row out;
    for (const auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

/// Per-task output: a report row plus named values for the summary.
struct TaskResult {
    Row row;
    std::map<std::string, double> values;
    std::vector<Row> extraRows;
    std::vector<std::string> notes;
    std::size_t failures = 0;
};

/// Runs fn over grid x seeds in parallel and collects results in order.
std::vector<std::vector<TaskResult>> runGrid(const ExperimentConfig& config, const std::vector<GridPoint>& points,
                                             const std::function<TaskResult(const GridPoint&, std::uint64_t)>& fn) {
    const std::size_t seeds = config.seeds.size();
    std::vector<TaskResult> flat(points.size() * seeds);
    detail::parallelFor(flat.size(), config.parallel,
                        [&](std::size_t i) { flat[i] = fn(points[i / seeds], config.seeds[i % seeds]); });
    std::vector<std::vector<TaskResult>> out(points.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        out[i / seeds].push_back(std::move(flat[i]));
    }
    return out;
}

void collect(RunReport& report, const std::vector<std::vector<TaskResult>>& results) {
    std::set<std::string> seen;
    for (const auto& point : results) {
        for (const auto& r : point) {
            if (!r.row.empty()) {
                report.rows.push_back(r.row);
            }
            report.rows.insert(report.rows.end(), r.extraRows.begin(), r.extraRows.end());
            for (const auto& n : r.notes) {
                if (seen.insert(n).second) {
                    report.notes.push_back(n);
                }
            }
            report.failures += r.failures;
        }
    }
}

Row statCells(const std::vector<TaskResult>& point, const std::string& key) {
    std::vector<double> values;
    for (const auto& r : point) {
        if (const auto it = r.values.find(key); it != r.values.end()) {
            values.push_back(it->second);
        }
    }
    if (values.empty()) {
        return {std::string(), std::string(), std::string()};
    }
    const Statistics s = summarize(values);
    return {s.mean, s.stddev, s.threeSigma};
}

std::vector<std::string> statHeader(const std::string& name) {
    return {name + "_mean", name + "_std", name + "_3sigma"};
}

Json cellJson(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return std::isfinite(*d) ? Json(*d) : Json();
    }
    if (const auto* n = std::get_if<std::int64_t>(&c)) {
        return *n;
    }
    const auto& s = std::get<std::string>(c);
    return s.empty() ? Json() : Json(s);
}

Json tableJson(const std::vector<std::string>& header, const std::vector<Row>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        Json obj = Json::object();
        for (std::size_t i = 0; i < header.size(); ++i) {
            obj[header[i]] = cellJson(row[i]);
        }
        out.push_back(std::move(obj));
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    if (!(splitRatio > 0.0 && splitRatio < 1.0)) {
        throw ConfigError("data.split_ratio must lie in (0, 1)");
    }
    if (dataPath.empty() && (syntheticRows < 4 || syntheticFeatures < 1)) {
        throw ConfigError("synthetic data needs at least 4 rows and 1 feature");
    }
    for (double r : radiusGrid()) {
        if (!(r >= 0.0)) {
            throw ConfigError("radius must be non-negative");
        }
    }
    for (double p : percentageGrid()) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("percentage must lie in [0, 1]");
        }
    }
    for (double l : lambdaGrid()) {
        if (!(l >= 0.0)) {
            throw ConfigError("lambda must be non-negative");
        }
    }
    if (!(threshold > 0.0)) {
        throw ConfigError("report.threshold must be positive");
    }
    if (format != "csv" && format != "json") {
        throw ConfigError("report.format must be csv or json");
    }
    if (seeds.empty()) {
        throw ConfigError("sweep.seeds must not be empty");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("sweep.seeds must be distinct");
    }
    if (!(kScale >= 0.0)) {
        throw ConfigError("oracle.k_scale must be non-negative");
    }
}

void setConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
    it->second(config, key, value);
}

ExperimentConfig parseConfig(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    ExperimentConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("config: key '" + section + "' must be inside a section");
        }
        for (const auto& [key, value] : body) {
            setConfigValue(config, section + "." + key, value.get_value<std::string>());
        }
    }
    return config;
}

ExperimentConfig loadConfig(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseConfig(buffer.str());
}

std::string configText(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[data]\n"
        << "path = " << c.dataPath.string() << "\nlabel = " << c.label << "\nfeatures = " << joinStrings(c.features)
        << "\nsplit_ratio = " << formatNumber(c.splitRatio) << "\ndrop_missing = " << (c.dropMissing ? "true" : "false")
        << "\nsynthetic_rows = " << c.syntheticRows << "\nsynthetic_features = " << c.syntheticFeatures
        << "\nsynthetic_noise = " << formatNumber(c.syntheticNoise) << "\nsynthetic_seed = " << c.syntheticSeed
        << "\n\n[uncertainty]\n"
        << "target = " << enumName(c.target, kTargets) << "\ncolumns = " << joinStrings(c.uncertainColumns)
        << "\npercentage = " << formatNumber(c.percentage) << "\nradius = " << formatNumber(c.radius)
        << "\n\n[model]\n"
        << "lambda = " << formatNumber(c.lambda) << "\ntransform = " << enumName(c.transform, kTransforms)
        << "\nsplit_budget = " << c.splitBudget << "\nparallel = " << (c.parallel ? "true" : "false")
        << "\n\n[report]\n"
        << "threshold = " << formatNumber(c.threshold) << "\nloss = " << enumName(c.lossFormula, kLosses)
        << "\nout_dir = " << c.outDir.string() << "\nformat = " << c.format << "\n\n[sweep]\n"
        << "radius = " << joinNumbers(c.radii) << "\npercentage = " << joinNumbers(c.percentages)
        << "\nlambda = " << joinNumbers(c.lambdas) << "\nseeds = " << joinNumbers(c.seeds) << "\n\n[oracle]\n"
        << "samples = " << c.samples << "\nstrategy = " << enumName(c.strategy, kStrategies)
        << "\ngrid_levels = " << c.gridLevels << "\nbudget = " << c.oracleBudget
        << "\nk_scale = " << formatNumber(c.kScale) << '\n';
    return out.str();
}

Dataset syntheticDataset(Eigen::Index rows, Eigen::Index features, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd f(rows, features);
    for (auto& x : f.reshaped()) {
        x = 10.0 * unit(rng);
    }
    Eigen::VectorXd w(features);
    for (auto& x : w) {
        x = 4.0 * unit(rng) - 2.0;
    }
    Eigen::VectorXd y = f * w;
    for (auto& v : y) {
        v += 1.0 + noise * (2.0 * unit(rng) - 1.0);
    }
    return Dataset::fromFeatures(f, y);
}

Statistics summarize(const std::vector<double>& values) {
    Statistics s;
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    }
    s.threeSigma = 3.0 * s.stddev;
    return s;
}

std::string RunReport::rowsCsv() const {
    CsvWriter csv(header);
    for (const auto& r : rows) {
        csv.row(r);
    }
    return csv.str();
}

std::string RunReport::summaryCsv() const {
    CsvWriter csv(summaryHeader);
    for (const auto& r : summary) {
        csv.row(r);
    }
    return csv.str();
}

std::string RunReport::json() const {
    Json j;
    j["command"] = command;
    j["config"] = configEcho;
    j["rows"] = tableJson(header, rows);
    j["summary"] = tableJson(summaryHeader, summary);
    j["notes"] = notes;
    j["failures"] = failures;
    return j.dump(2);
}

void RunReport::save(const std::filesystem::path& dir, const std::string& format) const {
    if (format == "json") {
        writeTextFile(dir / (command + ".json"), json());
        return;
    }
    writeTextFile(dir / (command + ".csv"), rowsCsv());
    writeTextFile(dir / (command + "_summary.csv"), summaryCsv());
}

RunReport cmdCertify(const ExperimentConfig& config) {
    const Prepared p = prepare(config);
    const double threshold = thresholdFromFraction(config.threshold, p.labelRange);
    const bool labelsOnly = config.target == UncertaintyTarget::Labels;
    const auto points = grid(config);

    RunReport report;
    report.command = "certify";
    report.configEcho = configText(config);
    report.header = concat({{"seed"}, kGridHeader, {"threshold", "ratio", "baseline_ratio"}, kDiagHeader});
    const auto results = runGrid(config, points, [&](const GridPoint& g, std::uint64_t seed) {
        const Trial t = makeTrial(p, config, g, seed);
        const auto [w, diag] = fixedPoint(t.data, ridgeConfig(config, g.lambda));
        TaskResult r;
        const double ratio = certifyRobustness(t.test.X, w, threshold).ratio;
        r.values["ratio"] = ratio;
        Cell baseline = std::string();
        if (labelsOnly) {
            const double b = robustnessOf(intervalRidgeLabels(t.data, g.lambda, t.test.X).predictions, threshold).ratio;
            r.values["baseline"] = b;
            baseline = b;
        }
        r.row = concatRow({{static_cast<std::int64_t>(seed)}, gridCells(g), {threshold, ratio, baseline},
                           diagnosticCells(diag)});
        return r;
    });
    collect(report, results);

    report.summaryHeader = concat({kGridHeader, {"seeds"}, statHeader("ratio"), statHeader("baseline_ratio")});
    for (std::size_t i = 0; i < points.size(); ++i) {
        report.summary.push_back(concatRow({gridCells(points[i]), {static_cast<std::int64_t>(config.seeds.size())},
                                            statCells(results[i], "ratio"), statCells(results[i], "baseline")}));
    }
    return report;
}

RunReport cmdLossRange(const ExperimentConfig& config) {
    const Prepared p = prepare(config);
    const auto points = grid(config);

    RunReport report;
    report.command = "loss-range";
    report.configEcho = configText(config);
    report.header = concat({{"seed"},
                            kGridHeader,
                            {"zonotope_lo", "zonotope_hi", "oracle_lo", "oracle_hi", "oracle_worlds", "sample_lo",
                             "sample_hi", "gap", "contained"},
                            kDiagHeader});
    const auto results = runGrid(config, points, [&](const GridPoint& g, std::uint64_t seed) {
        const Trial t = makeTrial(p, config, g, seed);
        const auto [w, diag] = fixedPoint(t.data, ridgeConfig(config, g.lambda));
        const LossInterval loss = lossInterval(t.test.X, t.test.y, w, g.lambda, config.lossFormula);
        TaskResult r;

        OracleOptions opts;
        opts.strategy = config.strategy;
        opts.gridLevels = config.gridLevels;
        opts.budget = config.oracleBudget;
        opts.lossFormula = config.lossFormula;
        opts.parallel = false;
        std::optional<WorldOracleResult> enumerated;
        std::size_t worlds = 0;
        try {
            enumerated = oracleRanges(t.data, g.lambda, t.test.X, t.test.y, opts);
            worlds = enumerated->weights.size();
        } catch (const BudgetExceeded&) {
            r.notes.push_back("world enumeration exceeds oracle.budget; using sampled worlds only");
        }
        std::optional<Interval> sampled;
        if (config.samples > 0) {
            OracleOptions s = opts;
            s.enumerate = false;
            s.samples = config.samples;
            s.seed = seed;
            sampled = oracleRanges(t.data, g.lambda, t.test.X, t.test.y, s).lossExtremes;
        }
        const Interval truth = enumerated ? enumerated->lossExtremes
                               : sampled  ? *sampled
                                          : Interval{loss.lo, loss.lo};
        const bool contained = loss.lo <= truth.lo + 1e-9 * (1.0 + std::abs(truth.lo)) &&
                               loss.hi >= truth.hi - 1e-9 * (1.0 + std::abs(truth.hi)) &&
                               (!sampled || (loss.lo <= sampled->lo + 1e-9 * (1.0 + std::abs(sampled->lo)) &&
                                             loss.hi >= sampled->hi - 1e-9 * (1.0 + std::abs(sampled->hi))));
        r.failures = contained ? 0 : 1;
        const double gap = (loss.hi - loss.lo) - truth.width();
        r.values["gap"] = gap;
        r.values["zonotope_lo"] = loss.lo;
        r.values["zonotope_hi"] = loss.hi;
        r.values["oracle_lo"] = truth.lo;
        r.values["oracle_hi"] = truth.hi;
        const Cell blank = std::string();
        r.row = concatRow({{static_cast<std::int64_t>(seed)},
                           gridCells(g),
                           {loss.lo, loss.hi, enumerated ? Cell(truth.lo) : blank, enumerated ? Cell(truth.hi) : blank,
                            static_cast<std::int64_t>(worlds), sampled ? Cell(sampled->lo) : blank,
                            sampled ? Cell(sampled->hi) : blank, gap, std::int64_t{contained ? 1 : 0}},
                           diagnosticCells(diag)});
        return r;
    });
    collect(report, results);

    report.summaryHeader = concat({kGridHeader,
                                   {"seeds"},
                                   statHeader("zonotope_lo"),
                                   statHeader("zonotope_hi"),
                                   statHeader("oracle_lo"),
                                   statHeader("oracle_hi"),
                                   statHeader("gap")});
    for (std::size_t i = 0; i < points.size(); ++i) {
        report.summary.push_back(concatRow({gridCells(points[i]),
                                            {static_cast<std::int64_t>(config.seeds.size())},
                                            statCells(results[i], "zonotope_lo"),
                                            statCells(results[i], "zonotope_hi"),
                                            statCells(results[i], "oracle_lo"),
                                            statCells(results[i], "oracle_hi"),
                                            statCells(results[i], "gap")}));
    }
    return report;
}

RunReport cmdLambdaSweep(const ExperimentConfig& config) {
    const Prepared p = prepare(config);
    const double threshold = thresholdFromFraction(config.threshold, p.labelRange);
    const auto points = grid(config);

    RunReport report;
    report.command = "lambda-sweep";
    report.configEcho = configText(config);
    report.header = concat({{"seed"}, kGridHeader, {"threshold", "ratio", "loss_lo", "loss_hi"}, kDiagHeader});
    const auto results = runGrid(config, points, [&](const GridPoint& g, std::uint64_t seed) {
        const Trial t = makeTrial(p, config, g, seed);
        const auto [w, diag] = fixedPoint(t.data, ridgeConfig(config, g.lambda));
        const double ratio = certifyRobustness(t.test.X, w, threshold).ratio;
        const LossInterval loss = lossInterval(t.test.X, t.test.y, w, g.lambda, config.lossFormula);
        TaskResult r;
        r.values["ratio"] = ratio;
        r.values["loss_hi"] = loss.hi;
        r.row = concatRow({{static_cast<std::int64_t>(seed)}, gridCells(g), {threshold, ratio, loss.lo, loss.hi},
                           diagnosticCells(diag)});
        return r;
    });
    collect(report, results);

    std::size_t best = 0;
    std::vector<double> meanLoss;
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<double> v;
        for (const auto& r : results[i]) {
            v.push_back(r.values.at("loss_hi"));
        }
        meanLoss.push_back(summarize(v).mean);
        if (meanLoss[i] < meanLoss[best]) {
            best = i;
        }
    }
    report.summaryHeader =
        concat({kGridHeader, {"seeds"}, statHeader("ratio"), statHeader("worst_loss"), {"best_worst_loss"}});
    for (std::size_t i = 0; i < points.size(); ++i) {
        report.summary.push_back(concatRow({gridCells(points[i]),
                                            {static_cast<std::int64_t>(config.seeds.size())},
                                            statCells(results[i], "ratio"),
                                            statCells(results[i], "loss_hi"),
                                            {std::int64_t{i == best ? 1 : 0}}}));
    }
    report.notes.push_back("lambda minimizing the mean worst-case loss: " + formatNumber(points[best].lambda));
    return report;
}

RunReport cmdOracleCheck(const ExperimentConfig& config) {
    const Prepared p = prepare(config);
    const auto points = grid(config);
    constexpr std::size_t kCornerLimit = std::size_t{1} << 12;

    RunReport report;
    report.command = "oracle-check";
    report.configEcho = configText(config);
    report.header = concat({{"seed"},
                            kGridHeader,
                            {"k_scale", "worlds", "weight_failures", "prediction_failures", "joined"},
                            kDiagHeader});
    const auto results = runGrid(config, points, [&](const GridPoint& g, std::uint64_t seed) {
        const Trial t = makeTrial(p, config, g, seed);
        auto [w, diag] = fixedPoint(t.data, ridgeConfig(config, g.lambda));
        w.k *= config.kScale;
        const auto preds = predictIntervals(t.test.X, w);

        std::vector<World> worlds = sampleWorlds(t.data, config.samples, seed);
        const std::size_t symbols = t.data.provenance.size();
        if (symbols < 63 && (std::size_t{1} << symbols) <= kCornerLimit) {
            const WorldEnumerator corners(t.data, WorldStrategy::Corner, 2, kCornerLimit);
            for (std::size_t i = 0; i < corners.size(); ++i) {
                worlds.push_back(corners.world(i));
            }
        }
        std::size_t weightFailures = 0;
        std::size_t predictionFailures = 0;
        for (const auto& world : worlds) {
            const Eigen::VectorXd ws = ridgeConcrete(world.X, world.y, g.lambda);
            weightFailures += containsWorldWeights(w, world.e, ws) ? 0 : 1;
            const Eigen::VectorXd values = t.test.X * ws;
            for (Eigen::Index i = 0; i < values.size(); ++i) {
                const auto& iv = preds[static_cast<std::size_t>(i)];
                const double tol = 1e-8 * (1.0 + std::abs(values[i]));
                predictionFailures += (values[i] < iv.lo - tol || values[i] > iv.hi + tol) ? 1 : 0;
            }
        }
        TaskResult r;
        r.failures = weightFailures + predictionFailures;
        if (diag.residual.applicable && !diag.residual.ok(w.k.cwiseAbs().maxCoeff() / std::max(config.kScale, 1e-300))) {
            r.notes.push_back("fixed-point residual above tolerance at seed " + std::to_string(seed));
        }
        r.row = concatRow({{static_cast<std::int64_t>(seed)},
                           gridCells(g),
                           {config.kScale, static_cast<std::int64_t>(worlds.size()),
                            static_cast<std::int64_t>(weightFailures), static_cast<std::int64_t>(predictionFailures),
                            std::int64_t{w.joined ? 1 : 0}},
                           diagnosticCells(diag)});
        return r;
    });
    collect(report, results);
    report.summaryHeader = {"checks", "failures"};
    report.summary.push_back({static_cast<std::int64_t>(report.rows.size()), static_cast<std::int64_t>(report.failures)});
    return report;
}

RunReport cmdParams(const ExperimentConfig& config) {
    const Prepared p = prepare(config);
    const auto points = grid(config);

    RunReport report;
    report.command = "params";
    report.configEcho = configText(config);
    report.header = concat({{"seed"}, kGridHeader, {"parameter", "lo", "hi", "inconclusive_sign"}, kDiagHeader});
    const auto results = runGrid(config, points, [&](const GridPoint& g, std::uint64_t seed) {
        const Trial t = makeTrial(p, config, g, seed);
        const auto [w, diag] = fixedPoint(t.data, ridgeConfig(config, g.lambda));
        TaskResult r;
        const auto params = parameterIntervals(w);
        for (std::size_t j = 0; j < params.size(); ++j) {
            const auto& name = p.data.columns[j];
            r.values[name + ".lo"] = params[j].range.lo;
            r.values[name + ".hi"] = params[j].range.hi;
            r.values[name + ".inconclusive"] = params[j].inconclusiveSign ? 1.0 : 0.0;
            r.extraRows.push_back(concatRow({{static_cast<std::int64_t>(seed)},
                                             gridCells(g),
                                             {name, params[j].range.lo, params[j].range.hi,
                                              std::int64_t{params[j].inconclusiveSign ? 1 : 0}},
                                             diagnosticCells(diag)}));
        }
        return r;
    });
    collect(report, results);

    report.summaryHeader = concat({kGridHeader, {"parameter", "lo_min", "hi_max", "inconclusive_seeds"}});
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (const auto& name : p.data.columns) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            std::int64_t inconclusive = 0;
            for (const auto& r : results[i]) {
                lo = std::min(lo, r.values.at(name + ".lo"));
                hi = std::max(hi, r.values.at(name + ".hi"));
                inconclusive += r.values.at(name + ".inconclusive") > 0.0 ? 1 : 0;
            }
            report.summary.push_back(concatRow({gridCells(points[i]), {name, lo, hi, inconclusive}}));
        }
    }
    return report;
}

} // namespace zonoridge
