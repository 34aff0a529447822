#include "tilt/cli/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "tilt/cli/run_config.hpp"

namespace tilt {

using nlohmann::json;

namespace {

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  TILT_VALIDATE(in.gcount() == 4, "checkpoint truncated in header");
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void write_tensor(std::ostream& out, const Tensor& t) {
  // payloads are 32-bit floats regardless of the build's working precision
  std::vector<float> buf(static_cast<size_t>(t.size()));
  for (int64_t i = 0; i < t.size(); ++i) buf[static_cast<size_t>(i)] = static_cast<float>(t[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

Tensor read_tensor(std::istream& in, const std::vector<int>& shape, const std::string& name) {
  Tensor t(shape);
  std::vector<float> buf(static_cast<size_t>(t.size()));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  TILT_VALIDATE(static_cast<size_t>(in.gcount()) == buf.size() * sizeof(float),
                "checkpoint truncated reading tensor '" << name << "'");
  for (int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<real>(buf[static_cast<size_t>(i)]);
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, TiltModel& model, AdamW* optimizer) {
  std::ofstream out(path, std::ios::binary);
  TILT_VALIDATE(out.good(), "cannot write checkpoint " << path);
  const std::vector<Parameter*> params = model.params();

  json header;
  header["config"] = tilt_config_to_json(model.config());
  header["tensors"] = json::array();
  for (const Parameter* p : params) {
    header["tensors"].push_back({{"name", p->name}, {"shape", p->value.shape()}});
  }
  if (optimizer) {
    TILT_CHECK(optimizer->first_moments().size() == params.size(),
               "optimizer state does not cover the model parameters");
    header["optimizer"] = {
        {"step", optimizer->step_count()},
        {"lr", static_cast<double>(optimizer->config().lr)},
        {"beta1", static_cast<double>(optimizer->config().beta1)},
        {"beta2", static_cast<double>(optimizer->config().beta2)},
        {"eps", static_cast<double>(optimizer->config().eps)},
        {"weight_decay", static_cast<double>(optimizer->config().weight_decay)}};
    for (size_t i = 0; i < params.size(); ++i) {
      header["tensors"].push_back(
          {{"name", "opt.m." + params[i]->name}, {"shape", params[i]->value.shape()}});
      header["tensors"].push_back(
          {{"name", "opt.v." + params[i]->name}, {"shape", params[i]->value.shape()}});
    }
  }
  const std::string header_str = header.dump();

  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_u32(out, kCheckpointVersion);
  write_u32(out, static_cast<uint32_t>(header_str.size()));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const Parameter* p : params) write_tensor(out, p->value);
  if (optimizer) {
    for (size_t i = 0; i < params.size(); ++i) {
      write_tensor(out, optimizer->first_moments()[i]);
      write_tensor(out, optimizer->second_moments()[i]);
    }
  }
  TILT_VALIDATE(out.good(), "short write to checkpoint " << path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TILT_VALIDATE(in.good(), "cannot open checkpoint " << path);
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  TILT_VALIDATE(in.gcount() == sizeof(magic) &&
                    std::memcmp(magic, kCheckpointMagic, sizeof(magic)) == 0,
                path << ": not a checkpoint (bad magic)");
  const uint32_t version = read_u32(in);
  TILT_VALIDATE(version == kCheckpointVersion,
                path << ": unsupported checkpoint version " << version);
  const uint32_t header_len = read_u32(in);
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), header_len);
  TILT_VALIDATE(static_cast<uint32_t>(in.gcount()) == header_len, path << ": truncated header");
  json header;
  try {
    header = json::parse(header_str);
  } catch (const std::exception& e) {
    throw ValidationError(path + ": bad header json: " + e.what());
  }

  const TiltConfig cfg = tilt_config_from_json(header.at("config"));
  LoadedCheckpoint loaded{TiltModel(cfg, /*seed=*/0)};
  const std::vector<Parameter*> params = loaded.model.params();
  const json& manifest = header.at("tensors");

  const bool has_opt = header.contains("optimizer");
  const size_t expected = params.size() * (has_opt ? 3 : 1);
  TILT_VALIDATE(manifest.size() >= expected, path << ": manifest lists " << manifest.size()
                                                  << " tensors, model needs " << expected);

  size_t idx = 0;
  auto expect_entry = [&](const std::string& name, const std::vector<int>& shape) -> Tensor {
    TILT_VALIDATE(idx < manifest.size(), path << ": missing tensor '" << name << "'");
    const json& e = manifest[idx];
    const std::string got = e.at("name").get<std::string>();
    TILT_VALIDATE(got == name, path << ": unexpected tensor '" << got << "' (expected '" << name
                                    << "')");
    const std::vector<int> got_shape = e.at("shape").get<std::vector<int>>();
    TILT_VALIDATE(got_shape == shape, path << ": tensor '" << name << "' shape drifted");
    ++idx;
    return read_tensor(in, shape, name);
  };

  for (Parameter* p : params) p->value = expect_entry(p->name, p->value.shape());
  if (has_opt) {
    const json& o = header.at("optimizer");
    loaded.has_optimizer = true;
    loaded.optim_step = o.at("step").get<int64_t>();
    loaded.optim_config.lr = static_cast<real>(o.at("lr").get<double>());
    loaded.optim_config.beta1 = static_cast<real>(o.at("beta1").get<double>());
    loaded.optim_config.beta2 = static_cast<real>(o.at("beta2").get<double>());
    loaded.optim_config.eps = static_cast<real>(o.at("eps").get<double>());
    loaded.optim_config.weight_decay = static_cast<real>(o.at("weight_decay").get<double>());
    for (Parameter* p : params) {
      loaded.optim_m.push_back(expect_entry("opt.m." + p->name, p->value.shape()));
      loaded.optim_v.push_back(expect_entry("opt.v." + p->name, p->value.shape()));
    }
  }
  TILT_VALIDATE(idx == manifest.size(),
                path << ": unexpected extra tensor '"
                     << manifest[idx].at("name").get<std::string>() << "'");
  return loaded;
}

}  // namespace tilt
