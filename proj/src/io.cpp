#include "dtmon/io.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "dtmon/error.hpp"

namespace dtmon {

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream out;
  for (unsigned int k = 0; k < len; ++k) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return out.str();
}

nlohmann::json to_json(const TimelineRecord& r) {
  return {{"monitor", r.monitor},
          {"localTime", r.local_time},
          {"tmin1", r.tmin1},
          {"verdict", to_string(r.verdict)},
          {"definitive", r.definitive}};
}

nlohmann::json to_json(const Delivery& d, const SentMessage& m) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : m.message.actions) actions.push_back(a.name);
  return {{"src", d.src},           {"dst", d.dst},
          {"seq", d.seq},           {"timestamp", m.message.timestamp},
          {"actions", actions},     {"sendTime", d.send_time},
          {"deliverTime", d.deliver_time}, {"localTime", d.local_time}};
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + p.string() + "'");
  return out;
}

std::vector<nlohmann::json> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot read '" + p.string() + "'");
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(p.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

void write_trace(const std::filesystem::path& dir, const SimTrace& trace, const nlohmann::json& header) {
  std::filesystem::create_directories(dir);
  nlohmann::json head = header;
  head["type"] = "header";
  head["configHash"] = trace.config_hash;

  auto g = open_out(dir / "global_trace.jsonl");
  g << head.dump() << '\n';
  std::vector<std::size_t> next(trace.observations.size(), 0);
  for (const auto& e : trace.global_trace.events) {
    const auto c = static_cast<std::size_t>(e.action.component - 1);
    const Ticks local = trace.observations.at(c).events.at(next[c]++).date;
    g << nlohmann::json{{"component", e.action.component}, {"action", e.action.name}, {"global", e.date},
                        {"local", local}}
             .dump()
      << '\n';
  }

  auto d = open_out(dir / "deliveries.jsonl");
  d << head.dump() << '\n';
  for (const auto& del : trace.deliveries) d << to_json(del, trace.messages.at(del.message)).dump() << '\n';

  auto v = open_out(dir / "verdicts.jsonl");
  v << head.dump() << '\n';
  for (const auto& r : trace.timeline) v << to_json(r).dump() << '\n';
  for (const auto& s : trace.summary) {
    nlohmann::json j{{"type", "final"}, {"monitor", s.monitor}, {"verdict", to_string(s.verdict)}, {"tmin1", s.tmin1}};
    j["definitiveAt"] = s.definitive_at ? nlohmann::json(*s.definitive_at) : nlohmann::json(nullptr);
    v << j.dump() << '\n';
  }
}

Scenario scenario_from_trace(const std::filesystem::path& dir, const Scenario& base, const Alphabet& alphabet) {
  Scenario s = base;
  for (auto& c : s.components) c.events.clear();
  try {
    for (const auto& j : read_lines(dir / "global_trace.jsonl")) {
      if (j.contains("type")) continue;
      const int comp = j.at("component").get<int>();
      if (comp < 1 || static_cast<std::size_t>(comp) > s.components.size())
        throw ValidationError("trace names unknown component " + std::to_string(comp));
      s.components[static_cast<std::size_t>(comp - 1)].events.push_back(
          {alphabet.at(j.at("action").get<std::string>()), j.at("global").get<Ticks>()});
    }
    s.deliveries.clear();
    for (const auto& j : read_lines(dir / "deliveries.jsonl")) {
      if (j.contains("type")) continue;
      s.deliveries[{j.at("src").get<int>(), j.at("dst").get<int>(), j.at("seq").get<std::uint64_t>()}] =
          j.at("deliverTime").get<Ticks>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("trace: ") + e.what());
  }
  return s;
}

}  // namespace dtmon
