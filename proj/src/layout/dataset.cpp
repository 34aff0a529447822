#include "tilt/layout/dataset.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tilt/check.hpp"

namespace tilt {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

TaskKind parse_task(const std::string& s) {
  if (s == "qa") return TaskKind::qa;
  if (s == "kie") return TaskKind::kie;
  if (s == "classify") return TaskKind::classify;
  throw ValidationError("unknown task kind '" + s + "'");
}

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::qa: return "qa";
    case TaskKind::kie: return "kie";
    case TaskKind::classify: return "classify";
  }
  return "qa";
}

Document parse_document(const json& j, const fs::path& base_dir) {
  Document doc;
  doc.id = j.at("id").get<std::string>();
  const json& p = j.at("page");
  doc.page.width = p.at("width").get<int>();
  doc.page.height = p.at("height").get<int>();
  if (p.contains("image_path") && !p.at("image_path").is_null()) {
    const auto rel = p.at("image_path").get<std::string>();
    doc.page.image = load_pnm((base_dir / rel).string());
  }
  for (const json& tj : j.at("tokens")) {
    Token t;
    t.text = tj.at("text").get<std::string>();
    const json& b = tj.at("bbox");
    TILT_VALIDATE(b.is_array() && b.size() == 4, "doc '" << doc.id << "': bbox must have 4 values");
    t.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    t.kind = t.text.empty() ? TokenKind::image_anchor : TokenKind::word;
    doc.tokens.push_back(std::move(t));
  }
  if (j.contains("annotations")) {
    for (const json& aj : j.at("annotations")) {
      TaskInstance inst;
      inst.task = parse_task(aj.at("task").get<std::string>());
      inst.prompt = aj.at("prompt").get<std::string>();
      for (const json& ans : aj.at("answers")) inst.answers.push_back(ans.get<std::string>());
      doc.annotations.push_back(std::move(inst));
    }
  }
  validate_document(doc);
  return doc;
}

}  // namespace

std::vector<Document> load_dataset(const std::string& path) {
  std::ifstream in(path);
  TILT_VALIDATE(in.good(), "cannot open dataset " << path);
  const fs::path base_dir = fs::path(path).parent_path();
  std::vector<Document> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      docs.push_back(parse_document(json::parse(line), base_dir));
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw ValidationError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void save_dataset(const std::vector<Document>& docs, const std::string& path,
                  const std::string& images_subdir) {
  const fs::path base_dir = fs::path(path).parent_path();
  std::ofstream out(path);
  TILT_VALIDATE(out.good(), "cannot write dataset " << path);
  bool made_img_dir = false;
  for (const Document& doc : docs) {
    json j;
    j["id"] = doc.id;
    j["page"]["width"] = doc.page.width;
    j["page"]["height"] = doc.page.height;
    if (doc.page.image) {
      if (!made_img_dir) {
        fs::create_directories(base_dir / images_subdir);
        made_img_dir = true;
      }
      const std::string rel = images_subdir + "/" + doc.id + ".pgm";
      save_pgm(*doc.page.image, (base_dir / rel).string());
      j["page"]["image_path"] = rel;
    } else {
      j["page"]["image_path"] = nullptr;
    }
    j["tokens"] = json::array();
    for (const Token& t : doc.tokens) {
      j["tokens"].push_back(
          {{"text", t.text}, {"bbox", {t.bbox.x0, t.bbox.y0, t.bbox.x1, t.bbox.y1}}});
    }
    j["annotations"] = json::array();
    for (const TaskInstance& inst : doc.annotations) {
      j["annotations"].push_back(
          {{"task", task_name(inst.task)}, {"prompt", inst.prompt}, {"answers", inst.answers}});
    }
    out << j.dump() << "\n";
  }
  TILT_VALIDATE(out.good(), "short write to " << path);
}

}  // namespace tilt
