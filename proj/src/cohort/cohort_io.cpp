#include "akisub/cohort/cohort_io.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"

namespace akisub::cohort {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "akisub-cohort";
constexpr int kVersion = 1;

json series_to_json(const std::map<std::string, EventSeries>& series) {
    json out = json::object();
    for (const auto& [name, s] : series) {
        json pts = json::array();
        for (const auto& p : s.points) pts.push_back(json::array({p.offset_hours, p.value}));
        out[name] = std::move(pts);
    }
    return out;
}

std::map<std::string, EventSeries> series_from_json(const json& j) {
    std::map<std::string, EventSeries> out;
    for (const auto& [name, pts] : j.items()) {
        EventSeries s{name, {}};
        for (const auto& p : pts) {
            if (!p.is_array() || p.size() != 2) throw ParseError("event point must be [offset, value]");
            s.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        out.emplace(name, std::move(s));
    }
    return out;
}

json stay_to_json(const IcuStay& s) {
    json j;
    j["stay_id"] = s.stay_id;
    j["patient_id"] = s.patient_id;
    j["age"] = s.age;
    j["sex"] = to_string(s.sex);
    j["ethnicity"] = to_string(s.ethnicity);
    j["weight_kg"] = s.weight_kg;
    j["los_hours"] = s.los_hours;
    j["med_flags"] = s.med_flags;
    j["comorbidity_flags"] = s.comorbidity_flags;
    j["rrt_flag"] = s.rrt_flag;
    j["chart_series"] = series_to_json(s.chart_series);
    j["lab_series"] = series_to_json(s.lab_series);
    json notes = json::array();
    for (const auto& n : s.notes) notes.push_back({{"offset_hours", n.offset_hours}, {"tokens", n.tokens}});
    j["notes"] = std::move(notes);
    j["planted_subtype"] = s.planted_subtype ? json(*s.planted_subtype) : json(nullptr);
    j["planted_stage"] = s.planted_stage ? json(*s.planted_stage) : json(nullptr);
    return j;
}

std::optional<int> optional_int(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<int>();
}

IcuStay stay_from_json(const json& j) {
    IcuStay s;
    s.stay_id = j.at("stay_id").get<std::string>();
    s.patient_id = j.at("patient_id").get<std::string>();
    s.age = j.at("age").get<double>();
    s.sex = parse_sex(j.at("sex").get<std::string>());
    s.ethnicity = parse_ethnicity(j.at("ethnicity").get<std::string>());
    s.weight_kg = j.at("weight_kg").get<double>();
    s.los_hours = j.at("los_hours").get<double>();
    s.med_flags = j.at("med_flags").get<std::array<bool, 4>>();
    s.comorbidity_flags = j.at("comorbidity_flags").get<std::array<bool, 9>>();
    s.rrt_flag = j.value("rrt_flag", false);
    s.chart_series = series_from_json(j.at("chart_series"));
    s.lab_series = series_from_json(j.at("lab_series"));
    for (const auto& n : j.at("notes")) {
        s.notes.push_back({n.at("offset_hours").get<double>(), n.at("tokens").get<std::vector<std::string>>()});
    }
    s.planted_subtype = optional_int(j, "planted_subtype");
    s.planted_stage = optional_int(j, "planted_stage");
    return s;
}

}  // namespace

void write_cohort(const std::vector<IcuStay>& stays, std::ostream& out) {
    out << json{{"format", kFormat}, {"version", kVersion}}.dump() << '\n';
    for (const auto& s : stays) out << stay_to_json(s).dump() << '\n';
    if (!out) throw IoError("failed writing cohort stream");
}

void write_cohort(const std::vector<IcuStay>& stays, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_cohort(stays, out);
}

std::vector<IcuStay> read_cohort(std::istream& in) {
    std::vector<IcuStay> stays;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            if (!header_seen) {
                if (j.value("format", "") != kFormat) throw ParseError("missing cohort header");
                if (j.value("version", 0) != kVersion) throw ParseError("unsupported cohort version");
                header_seen = true;
                continue;
            }
            IcuStay s = stay_from_json(j);
            validate(s);
            stays.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ParseError("cohort line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError("cohort line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw ParseError("cohort line 1: missing cohort header");
    return stays;
}

std::vector<IcuStay> read_cohort(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_cohort(in);
}

}  // namespace akisub::cohort
