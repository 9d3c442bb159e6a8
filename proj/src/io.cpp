#include "previnc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "previnc/errors.hpp"

namespace previnc {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no, const std::string& field) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", field '" + field +
                                           "': not a number: '" + text + "'");
  }
  return value;
}

void format_double(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

DistSpec dist_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dist")) {
    throw Error(ErrorKind::ConfigInvalid, "distribution spec must be an object with a 'dist' key");
  }
  const std::string kind = j.at("dist").get<std::string>();
  DistSpec spec;
  if (kind == "exponential") {
    spec = DistSpec::exponential(j.at("mean").get<double>());
  } else if (kind == "weibull") {
    spec = DistSpec::weibull(j.at("shape").get<double>(), j.at("scale").get<double>());
  } else if (kind == "gamma") {
    spec = DistSpec::gamma(j.at("shape").get<double>(), j.at("scale").get<double>());
  } else if (kind == "discrete") {
    spec = DistSpec::discrete(j.at("points").get<std::vector<double>>(),
                              j.at("probs").get<std::vector<double>>());
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown distribution '" + kind + "'");
  }
  spec.validate();
  return spec;
}

}  // namespace

std::vector<PrevalentRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  std::vector<PrevalentRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields != std::vector<std::string>{"bwd", "fwd_obs", "event", "age_cat"}) {
        throw Error(ErrorKind::ParseError,
                    "line 1: expected header 'bwd,fwd_obs,event,age_cat', got '" + line + "'");
      }
      continue;
    }
    if (fields.size() != 4) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                             std::to_string(fields.size()));
    }
    PrevalentRecord rec;
    rec.bwd = parse_double(fields[0], line_no, "bwd");
    rec.fwd_obs = parse_double(fields[1], line_no, "fwd_obs");
    if (fields[2] == "1") {
      rec.event = true;
    } else if (fields[2] == "0") {
      rec.event = false;
    } else {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ", field 'event': must be 0 or 1");
    }
    if (!fields[3].empty()) rec.age_cat = fields[3];
    records.push_back(std::move(rec));
  }
  return records;
}

void write_records_csv(const std::string& path, const std::vector<PrevalentRecord>& records) {
  std::string out = "bwd,fwd_obs,event,age_cat\n";
  for (const auto& r : records) {
    format_double(out, r.bwd);
    out += ',';
    format_double(out, r.fwd_obs);
    out += ',';
    out += r.event ? '1' : '0';
    out += ',';
    if (r.age_cat) out += *r.age_cat;
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::ConfigInvalid, "cannot write " + path);
  file << out;
}

AgeDistribution read_age_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);

  AgeDistribution age;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() < 3 || fields[0] != "segment_start" || fields[1] != "segment_end") {
        throw Error(ErrorKind::ParseError,
                    "line 1: expected header 'segment_start,segment_end,<category>,...'");
      }
      age.categories.assign(fields.begin() + 2, fields.end());
      continue;
    }
    if (fields.size() != age.categories.size() + 2) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(age.categories.size() + 2) + " fields");
    }
    AgeSegment seg;
    seg.start = parse_double(fields[0], line_no, "segment_start");
    seg.end = parse_double(fields[1], line_no, "segment_end");
    for (std::size_t z = 0; z < age.categories.size(); ++z) {
      seg.probs.push_back(parse_double(fields[2 + z], line_no, age.categories[z]));
    }
    age.segments.push_back(std::move(seg));
  }
  const auto violations = age.validate();
  if (!violations.empty()) {
    throw Error(ErrorKind::ConfigInvalid, path + ": " + violations.front());
  }
  return age;
}

const char* sim_mode_name(SimMode mode) {
  return mode == SimMode::window ? "window" : "equilibrium";
}

SimRun read_sim_config(const std::string& path) {
  try {
    return parse_sim_run(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ConfigInvalid) {
      throw Error(e.kind(), path + ": " + e.what());
    }
    throw;
  }
}

SimRun parse_sim_run(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }

  SimRun run;
  try {
    const std::string mode = j.value("mode", "equilibrium");
    if (mode == "window") {
      run.mode = SimMode::window;
    } else if (mode == "equilibrium") {
      run.mode = SimMode::equilibrium;
    } else {
      throw Error(ErrorKind::ConfigInvalid, "mode must be 'window' or 'equilibrium'");
    }
    run.config.s = j.at("s").get<std::size_t>();
    run.config.seed = j.value("seed", 0ULL);
    run.config.tau_star = j.value("tau_star", 0.0);
    run.config.ramp = j.value("ramp", 0.0);
    if (j.contains("censor") && !j.at("censor").is_null()) {
      run.config.censor = dist_from_json(j.at("censor"));
    }
    if (j.contains("age")) {
      const json& ja = j.at("age");
      AgeSimConfig age;
      age.age.categories = ja.at("categories").get<std::vector<std::string>>();
      for (const json& js : ja.at("segments")) {
        AgeSegment seg;
        seg.start = js.at("start").get<double>();
        seg.end = js.at("end").get<double>();
        seg.probs = js.at("probs").get<std::vector<double>>();
        age.age.segments.push_back(std::move(seg));
      }
      age.rates = ja.at("rates").get<std::vector<double>>();
      for (const json& js : ja.at("survival")) age.survival.push_back(dist_from_json(js));
      run.config.age = std::move(age);
      if (j.contains("lambda") || j.contains("survival")) {
        throw Error(ErrorKind::ConfigInvalid,
                    "give either overall (lambda, survival) or age-specific parameters, not both");
      }
    } else {
      run.config.lambda_true = j.at("lambda").get<double>();
      run.config.survival = dist_from_json(j.at("survival"));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  run.config.validate(run.mode == SimMode::window);
  return run;
}

std::string files_digest(const std::vector<std::string>& paths) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& path : paths) {
    const std::string bytes = read_file(path);
    for (unsigned char c : bytes) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
    hash ^= 0xff;  // file boundary
    hash *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace previnc
