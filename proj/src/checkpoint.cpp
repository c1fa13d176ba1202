#include "jtag/checkpoint.hpp"

#include <cstring>
#include <sstream>

#include "jtag/io.hpp"

namespace jtag {

namespace {

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  const std::string origin;

  void need(size_t n) const {
    if (pos + n > buf.size()) throw DataError(origin + ": truncated checkpoint");
  }
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(buf[pos++]);
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint8_t>(buf[pos]) | (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1])) << 8);
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  float f32() {
    const uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  bool eof() const { return pos >= buf.size(); }
};

}  // namespace

std::string serialize_model_config(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "variant=" << variant_name(cfg.variant) << "\n"
      << "word_emb_dim=" << cfg.word_emb_dim << "\n"
      << "char_emb_dim=" << cfg.char_emb_dim << "\n"
      << "tag_emb_dim=" << cfg.tag_emb_dim << "\n"
      << "char_hidden=" << cfg.char_hidden << "\n"
      << "word_hidden=" << cfg.word_hidden << "\n"
      << "tagger_hidden=" << cfg.tagger_hidden << "\n"
      << "dropout_rate=" << fmt_exact(cfg.dropout_rate) << "\n"
      << "dropout_on_char=" << (cfg.dropout_on_char ? 1 : 0) << "\n"
      << "dropout_on_input=" << (cfg.dropout_on_input ? 1 : 0) << "\n"
      << "dropout_on_word=" << (cfg.dropout_on_word ? 1 : 0) << "\n"
      << "heads_on_encoder=" << (cfg.heads_on_encoder ? 1 : 0) << "\n"
      << "stop_entity_gradient=" << (cfg.stop_entity_gradient ? 1 : 0) << "\n";
  return out.str();
}

ModelConfig parse_model_config(const std::string& text) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("model config: bad line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "variant") cfg.variant = parse_variant(value);
    else if (key == "word_emb_dim") cfg.word_emb_dim = std::stoll(value);
    else if (key == "char_emb_dim") cfg.char_emb_dim = std::stoll(value);
    else if (key == "tag_emb_dim") cfg.tag_emb_dim = std::stoll(value);
    else if (key == "char_hidden") cfg.char_hidden = std::stoll(value);
    else if (key == "word_hidden") cfg.word_hidden = std::stoll(value);
    else if (key == "tagger_hidden") cfg.tagger_hidden = std::stoll(value);
    else if (key == "dropout_rate") cfg.dropout_rate = std::stod(value);
    else if (key == "dropout_on_char") cfg.dropout_on_char = value == "1";
    else if (key == "dropout_on_input") cfg.dropout_on_input = value == "1";
    else if (key == "dropout_on_word") cfg.dropout_on_word = value == "1";
    else if (key == "heads_on_encoder") cfg.heads_on_encoder = value == "1";
    else if (key == "stop_entity_gradient") cfg.stop_entity_gradient = value == "1";
    else throw DataError("model config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

void save_checkpoint(const JointModel& model, const std::string& path) {
  std::string out;
  out += "JTAG";
  put_u16(out, kCheckpointVersion);
  out.push_back(static_cast<char>(model.config().variant));

  const std::string block = serialize_model_config(model.config()) + "[vocab]\n" +
                            model.vocab().serialize();
  put_u32(out, static_cast<uint32_t>(block.size()));
  out += block;

  for (const auto& [name, tensor] : model.params().items()) {
    put_u16(out, static_cast<uint16_t>(name.size()));
    out += name;
    out.push_back(static_cast<char>(tensor->shape.size()));
    for (int64_t d : tensor->shape) put_u32(out, static_cast<uint32_t>(d));
    for (double v : tensor->data) put_f32(out, static_cast<float>(v));
  }
  atomic_write_file(path, out);
}

std::unique_ptr<JointModel> load_checkpoint(const std::string& path) {
  const std::string buf = read_file(path);
  Reader r{buf, 0, path};
  if (r.bytes(4) != "JTAG") throw DataError(path + ": not a checkpoint (bad magic)");
  const uint16_t version = r.u16();
  if (version != kCheckpointVersion)
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));
  const uint8_t variant_id = r.u8();
  if (variant_id > static_cast<uint8_t>(Variant::ConditionalSoftmax))
    throw DataError(path + ": unknown variant id " + std::to_string(variant_id));

  const uint32_t block_len = r.u32();
  const std::string block = r.bytes(block_len);
  const auto vocab_pos = block.find("[vocab]\n");
  if (vocab_pos == std::string::npos) throw DataError(path + ": config block missing vocab");
  ModelConfig cfg = parse_model_config(block.substr(0, vocab_pos));
  if (cfg.variant != static_cast<Variant>(variant_id))
    throw DataError(path + ": variant id does not match config block");
  Vocab vocab = Vocab::deserialize(block.substr(vocab_pos + 8));

  auto model = std::make_unique<JointModel>(cfg, std::move(vocab), /*seed=*/0);

  size_t loaded = 0;
  while (!r.eof()) {
    const uint16_t name_len = r.u16();
    const std::string name = r.bytes(name_len);
    const uint8_t rank = r.u8();
    std::vector<int64_t> dims;
    for (uint8_t i = 0; i < rank; ++i) dims.push_back(static_cast<int64_t>(r.u32()));
    TensorPtr t = model->params().find(name);
    if (!t) throw DataError(path + ": unexpected tensor '" + name + "'");
    if (t->shape != dims) throw DataError(path + ": shape mismatch for tensor '" + name + "'");
    for (double& v : t->data) v = static_cast<double>(r.f32());
    ++loaded;
  }
  if (loaded != model->params().size())
    throw DataError(path + ": checkpoint holds " + std::to_string(loaded) + " tensors, model needs " +
                    std::to_string(model->params().size()));
  return model;
}

}  // namespace jtag
