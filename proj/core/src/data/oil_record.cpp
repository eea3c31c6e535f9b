#include "fluocnn/data/oil_record.hpp"

#include <set>

#include "fluocnn/error.hpp"
#include "fluocnn/text_io.hpp"

namespace fluocnn::data {

namespace {

constexpr std::string_view kLabelsHeader =
    "oil_id,acidity,peroxide,k270,k232,ethyl_esters,quality";
constexpr std::string_view kPredictionsHeader =
    "oil_id,acidity,peroxide,k270,k232,ethyl_esters";

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

std::string strip_bom(std::string_view s) {
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
      static_cast<unsigned char>(s[1]) == 0xBB &&
      static_cast<unsigned char>(s[2]) == 0xBF) {
    s.remove_prefix(3);
  }
  return std::string(s);
}

std::string normalized_header(std::string_view line) {
  std::string out;
  for (auto f : text::split_csv(line)) {
    if (!out.empty()) out += ',';
    out += f;
  }
  return out;
}

}  // namespace

std::string_view to_string(ParameterId p) {
  switch (p) {
    case ParameterId::acidity: return "acidity";
    case ParameterId::peroxide: return "peroxide";
    case ParameterId::k270: return "k270";
    case ParameterId::k232: return "k232";
    case ParameterId::ethyl_esters: return "ethyl_esters";
  }
  return "?";
}

std::string_view display_name(ParameterId p) {
  switch (p) {
    case ParameterId::acidity: return "Acidity (%)";
    case ParameterId::peroxide: return "Peroxide value (mEq O2/kg)";
    case ParameterId::k270: return "K270";
    case ParameterId::k232: return "K232";
    case ParameterId::ethyl_esters: return "Ethyl esters (mg/kg)";
  }
  return "?";
}

ParameterId parse_parameter(std::string_view name) {
  const auto n = text::trim(name);
  if (n == "acidity") return ParameterId::acidity;
  if (n == "peroxide" || n == "peroxide_value") return ParameterId::peroxide;
  if (n == "k270" || n == "K270") return ParameterId::k270;
  if (n == "k232" || n == "K232") return ParameterId::k232;
  if (n == "ethyl_esters" || n == "ethyl-esters" || n == "ee") {
    return ParameterId::ethyl_esters;
  }
  throw Error(ErrorKind::parse, "unknown parameter '" + std::string(name) + "'");
}

std::string_view to_string(Grade g) {
  switch (g) {
    case Grade::evoo: return "EVOO";
    case Grade::voo: return "VOO";
    case Grade::loo: return "LOO";
  }
  return "?";
}

Grade parse_grade(std::string_view name) {
  const auto n = text::trim(name);
  if (n == "EVOO") return Grade::evoo;
  if (n == "VOO") return Grade::voo;
  if (n == "LOO") return Grade::loo;
  throw Error(ErrorKind::parse, "unknown quality grade '" + std::string(name) + "'");
}

std::vector<OilRecord> parse_labels(std::string_view csv, bool require_quality) {
  const auto content = strip_bom(csv);
  const auto lines = lines_of(content);
  if (lines.empty()) throw ParseError(1, "empty labels file");

  const auto header = normalized_header(lines[0]);
  bool with_quality = true;
  if (header == kLabelsHeader) {
    with_quality = true;
  } else if (!require_quality && header == kPredictionsHeader) {
    with_quality = false;
  } else {
    throw ParseError(1, "unexpected header '" + header + "', expected '" +
                            std::string(kLabelsHeader) + "'");
  }
  const std::size_t arity = with_quality ? 7 : 6;

  std::vector<OilRecord> records;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    const auto fields = text::split_csv(lines[i]);
    if (fields.size() != arity) {
      throw ParseError(row, "expected " + std::to_string(arity) + " fields, got " +
                                std::to_string(fields.size()));
    }
    OilRecord rec;
    rec.oil_id = std::string(fields[0]);
    if (rec.oil_id.empty()) throw ParseError(row, "empty oil_id");
    for (auto p : kAllParameters) {
      const auto f = fields[1 + index_of(p)];
      if (f.empty() || f == "-") continue;
      double v = 0.0;
      try {
        v = text::parse_double(f);
      } catch (const Error& e) {
        throw ParseError(row, std::string(to_string(p)) + ": " + e.what());
      }
      if (!(v >= 0.0)) {
        throw ParseError(row, std::string(to_string(p)) + " must be nonnegative");
      }
      rec.set(p, v);
    }
    if (with_quality) {
      try {
        rec.quality = parse_grade(fields[6]);
      } catch (const Error& e) {
        throw ParseError(row, e.what());
      }
    }
    if (!seen.insert(rec.oil_id).second) {
      throw Error(ErrorKind::duplicate,
                  "row " + std::to_string(row) + ": duplicate oil_id " + rec.oil_id);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<OilRecord> load_labels(const std::filesystem::path& path,
                                   bool require_quality) {
  const auto text = text::read_file(path);
  try {
    return parse_labels(text, require_quality);
  } catch (const ParseError& e) {
    throw ParseError(e.row(), path.string() + ": " + e.what());
  }
}

std::string render_labels(const std::vector<OilRecord>& records, bool with_quality) {
  std::string out(with_quality ? kLabelsHeader : kPredictionsHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.oil_id;
    for (auto p : kAllParameters) {
      out += ',';
      out += r.has(p) ? text::format_double(*r.value(p)) : "-";
    }
    if (with_quality) {
      out += ',';
      out += r.quality ? to_string(*r.quality) : "-";
    }
    out += '\n';
  }
  return out;
}

std::vector<ExperimentalError> parse_experimental_errors(std::string_view csv) {
  const auto content = strip_bom(csv);
  const auto lines = lines_of(content);
  if (lines.empty() || normalized_header(lines[0]) != "oil_id,exp_error") {
    throw ParseError(1, "expected header 'oil_id,exp_error'");
  }
  std::vector<ExperimentalError> out;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto fields = text::split_csv(lines[i]);
    if (fields.size() != 2) throw ParseError(i + 1, "expected 2 fields");
    ExperimentalError e{std::string(fields[0]), 0.0};
    try {
      e.exp_error = text::parse_double(fields[1]);
    } catch (const Error& err) {
      throw ParseError(i + 1, err.what());
    }
    if (!(e.exp_error >= 0.0)) throw ParseError(i + 1, "exp_error must be nonnegative");
    if (!seen.insert(e.oil_id).second) {
      throw Error(ErrorKind::duplicate, "duplicate oil_id " + e.oil_id);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ExperimentalError> load_experimental_errors(const std::filesystem::path& path) {
  return parse_experimental_errors(text::read_file(path));
}

}  // namespace fluocnn::data
