/*
 * Copyright 2026 The etc-isotropic Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 a checked property failed (equivalence deviation,
// compression band, leakage ceiling, probe parity), 2 usage or I/O error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "etc/etc.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitUsage = 2;

struct KeyDeleter {
  void operator()(etc_key* k) const { etc_key_free(k); }
};
struct ImageDeleter {
  void operator()(etc_image* i) const { etc_image_free(i); }
};
struct ReportDeleter {
  void operator()(etc_report* r) const { etc_report_free(r); }
};
using KeyPtr = std::unique_ptr<etc_key, KeyDeleter>;
using ImagePtr = std::unique_ptr<etc_image, ImageDeleter>;
using ReportPtr = std::unique_ptr<etc_report, ReportDeleter>;

// Carries a failed etc_status up to main().
struct Failure {
  etc_status status;
  std::string message;
};

void Check(etc_status status, const std::string& context = {}) {
  if (status == ETC_OK) return;
  std::string msg = etc_last_error();
  if (!context.empty()) msg = context + ": " + msg;
  throw Failure{status, msg};
}

[[noreturn]] void UsageFailure(const std::string& message) {
  throw Failure{ETC_ERR_USAGE, message};
}

// Relative output paths go under $ETC_OUTPUT_DIR when it is set.
fs::path OutputPath(const std::string& path) {
  const char* root = std::getenv("ETC_OUTPUT_DIR");
  fs::path p(path);
  if (root != nullptr && *root != '\0' && p.is_relative()) return fs::path(root) / p;
  return p;
}

KeyPtr LoadKey(const std::string& path) {
  etc_key* key = nullptr;
  Check(etc_key_load(path.c_str(), &key));
  return KeyPtr(key);
}

struct CipherOptions {
  std::string key_path;
  uint32_t block = 16;
  std::string mode = "per-block";
  std::string steps = "all";
  uint32_t center_crop = 0;
  unsigned threads = 1;

  etc_cipher_spec Spec() const {
    etc_cipher_spec spec = etc_cipher_spec_default();
    spec.block_size = block;
    Check(etc_parse_mode(mode.c_str(), &spec.mode));
    Check(etc_parse_steps(steps.c_str(), &spec.steps));
    return spec;
  }
};

void AddCipherOptions(CLI::App* cmd, CipherOptions& o, bool key_required = true) {
  auto* key = cmd->add_option("--key", o.key_path, "key file");
  if (key_required) key->required();
  cmd->add_option("--block", o.block, "block size in pixels")->capture_default_str();
  cmd->add_option("--mode", o.mode, "per-block | uniform")->capture_default_str();
  cmd->add_option("--steps", o.steps,
                  "comma list of scramble,dihedral,negpos,colorshuffle (or all/none)")
      ->capture_default_str();
  cmd->add_option("--center-crop", o.center_crop,
                  "crop inputs to multiples of N pixels (0 = off)");
  cmd->add_option("--threads", o.threads, "worker threads")->capture_default_str();
}

ImagePtr LoadInput(const fs::path& path, uint32_t center_crop) {
  etc_image* img = nullptr;
  Check(etc_image_load(path.string().c_str(), &img), path.string());
  ImagePtr image(img);
  if (center_crop > 0) {
    etc_image* cropped = nullptr;
    Check(etc_image_center_crop(image.get(), center_crop, &cropped), path.string());
    image.reset(cropped);
  }
  return image;
}

bool SameFile(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  return fs::exists(b, ec) && fs::equivalent(a, b, ec);
}

std::vector<fs::path> ListInputs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      out.push_back(fs::relative(entry.path(), dir));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int RunCipher(const CipherOptions& o, const std::string& in, const std::string& out,
              bool encrypt) {
  const KeyPtr key = LoadKey(o.key_path);
  const etc_cipher_spec spec = o.Spec();
  auto process = [&](const fs::path& src, const fs::path& dst) {
    if (SameFile(src, dst)) UsageFailure("refusing to overwrite input " + src.string());
    ImagePtr image = LoadInput(src, o.center_crop);
    etc_image* result = nullptr;
    Check(encrypt ? etc_encrypt(image.get(), key.get(), &spec, &result)
                  : etc_decrypt(image.get(), key.get(), &spec, &result),
          src.string());
    ImagePtr owned(result);
    Check(etc_image_save_png(owned.get(), dst.string().c_str()), dst.string());
  };

  const fs::path src(in);
  const fs::path dst = OutputPath(out);
  std::error_code ec;
  if (!fs::is_directory(src, ec)) {
    process(src, dst);
    return kExitOk;
  }

  // Batch mode: mirror the relative layout, always writing PNG.
  const std::vector<fs::path> files = ListInputs(src);
  std::vector<fs::path> targets;
  for (const auto& rel : files) {
    fs::path target = dst / rel;
    target.replace_extension(".png");
    fs::create_directories(target.parent_path());
    targets.push_back(target);
  }
  std::vector<std::string> errors(files.size());
  std::vector<etc_status> statuses(files.size(), ETC_OK);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < files.size();) {
      try {
        process(src / files[i], targets[i]);
      } catch (const Failure& f) {
        statuses[i] = f.status;
        errors[i] = f.message;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::max(1U, std::min<unsigned>(o.threads, files.size()));
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (statuses[i] != ETC_OK) throw Failure{statuses[i], errors[i]};
  }
  std::cout << (encrypt ? "encrypted " : "decrypted ") << files.size()
            << " image(s) into " << dst.string() << '\n';
  return kExitOk;
}

std::vector<uint64_t> ParseSeeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used, 0));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      UsageFailure("--from-seeds: '" + item + "' is not an unsigned integer");
    }
  }
  if (seeds.size() != 4) UsageFailure("--from-seeds needs exactly four values");
  return seeds;
}

std::vector<int> ParseQualities(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      UsageFailure("--qf: '" + item + "' is not an integer");
    }
  }
  return out;
}

int PrintReport(const etc_report* report, bool json_lines) {
  std::cout << (json_lines ? etc_report_records(report) : etc_report_table(report));
  std::cout.flush();
  return etc_report_passed(report) ? kExitOk : kExitContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-wise EtC image cipher toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(etc_version()));

  // keygen
  std::string keygen_out;
  std::string keygen_seeds;
  bool keygen_force = false;
  auto* keygen = app.add_subcommand("keygen", "write a new key file");
  keygen->add_option("out", keygen_out, "key file to create")->required();
  keygen->add_flag("--force", keygen_force, "overwrite an existing file");
  keygen->add_option("--from-seeds", keygen_seeds,
                     "four comma-separated seeds instead of OS entropy");

  // encrypt / decrypt
  CipherOptions enc_opts, dec_opts;
  std::string enc_in, enc_out, dec_in, dec_out;
  auto* encrypt = app.add_subcommand("encrypt", "encrypt an image or a directory");
  AddCipherOptions(encrypt, enc_opts);
  encrypt->add_option("input", enc_in, "PNG/JPEG file or directory")->required();
  encrypt->add_option("output", enc_out, "PNG file or directory")->required();
  auto* decrypt = app.add_subcommand("decrypt", "decrypt an image or a directory");
  AddCipherOptions(decrypt, dec_opts);
  decrypt->add_option("input", dec_in, "PNG file or directory")->required();
  decrypt->add_option("output", dec_out, "PNG file or directory")->required();

  // embed-check
  CipherOptions emb_opts;
  emb_opts.mode = "uniform";
  uint32_t emb_dim = 64;
  uint32_t emb_trials = 100;
  uint64_t emb_seed = 0;
  std::string emb_in, emb_dump;
  auto* embed = app.add_subcommand(
      "embed-check", "check that adapted embedding params absorb the cipher");
  embed->add_option("--key", emb_opts.key_path, "key file")->required();
  embed->add_option("--patch", emb_opts.block, "patch / block size")->capture_default_str();
  embed->add_option("--mode", emb_opts.mode, "per-block | uniform")->capture_default_str();
  embed->add_option("--steps", emb_opts.steps, "enabled steps")->capture_default_str();
  embed->add_option("--dim", emb_dim, "embedding dimension")->capture_default_str();
  embed->add_option("--trials", emb_trials, "random parameter draws")->capture_default_str();
  embed->add_option("--seed", emb_seed, "parameter seed")->capture_default_str();
  embed->add_option("--center-crop", emb_opts.center_crop, "crop to multiples of N");
  embed->add_option("--dump-dir", emb_dump, "write matrices of the first trial here");
  embed->add_option("input", emb_in, "image")->required();

  // report compression / leakage
  auto* report = app.add_subcommand("report", "corpus reports");
  report->require_subcommand(1);
  CipherOptions cmp_opts, leak_opts;
  std::string cmp_corpus, leak_corpus, cmp_qf = "85,80";
  bool cmp_json = false, leak_json = false;
  auto* compression = report->add_subcommand(
      "compression", "JPEG/PNG sizes of plain vs encrypted images");
  compression->add_option("--corpus", cmp_corpus, "image directory")->required();
  AddCipherOptions(compression, cmp_opts);
  compression->add_option("--qf", cmp_qf, "JPEG quality factors")->capture_default_str();
  compression->add_flag("--json-lines", cmp_json, "print line-delimited JSON records");
  auto* leakage = report->add_subcommand(
      "leakage", "SSIM between plain and encrypted images");
  leakage->add_option("--corpus", leak_corpus, "image directory")->required();
  AddCipherOptions(leakage, leak_opts);
  leakage->add_flag("--json-lines", leak_json, "print line-delimited JSON records");

  // probe
  etc_probe_config probe_cfg = etc_probe_config_default();
  std::string probe_key, probe_corpus, probe_steps = "all";
  bool probe_json = false;
  auto* probe = app.add_subcommand("probe", "linear-probe accuracy parity experiment");
  auto* probe_corpus_opt =
      probe->add_option("--corpus", probe_corpus, "class-per-directory image corpus");
  probe->add_option("--synthetic", probe_cfg.synthetic, "synthetic shapes dataset size")
      ->capture_default_str()
      ->excludes(probe_corpus_opt);
  probe->add_option("--classes", probe_cfg.classes, "synthetic classes (2-6)")
      ->capture_default_str();
  probe->add_option("--key", probe_key, "key file")->required();
  probe->add_option("--block", probe_cfg.block_size, "block / patch size")->capture_default_str();
  probe->add_option("--dim", probe_cfg.dim, "embedding dimension")->capture_default_str();
  probe->add_option("--epochs", probe_cfg.epochs, "training epochs")->capture_default_str();
  probe->add_option("--lr", probe_cfg.learning_rate, "learning rate")->capture_default_str();
  probe->add_option("--batch", probe_cfg.batch_size, "mini-batch size")->capture_default_str();
  probe->add_option("--seed", probe_cfg.seed, "dataset / params / batch seed")
      ->capture_default_str();
  probe->add_option("--steps", probe_steps, "enabled steps")->capture_default_str();
  probe->add_option("--center-crop", probe_cfg.center_crop, "crop corpus images");
  probe->add_option("--threads", probe_cfg.threads, "worker threads")->capture_default_str();
  probe->add_flag("--json-lines", probe_json, "print line-delimited JSON records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*keygen) {
      etc_key* raw = nullptr;
      if (!keygen_seeds.empty()) {
        const std::vector<uint64_t> seeds = ParseSeeds(keygen_seeds);
        Check(etc_key_from_seeds(seeds.data(), &raw));
      } else {
        Check(etc_key_generate(&raw));
      }
      KeyPtr key(raw);
      const fs::path out = OutputPath(keygen_out);
      Check(etc_key_save(key.get(), out.string().c_str(), keygen_force ? 1 : 0));
      std::cout << "wrote " << out.string() << '\n';
      return kExitOk;
    }
    if (*encrypt) return RunCipher(enc_opts, enc_in, enc_out, true);
    if (*decrypt) return RunCipher(dec_opts, dec_in, dec_out, false);
    if (*embed) {
      const KeyPtr key = LoadKey(emb_opts.key_path);
      const etc_cipher_spec spec = emb_opts.Spec();
      const ImagePtr image = LoadInput(emb_in, emb_opts.center_crop);
      if (!emb_dump.empty()) fs::create_directories(OutputPath(emb_dump));
      const std::string dump = emb_dump.empty() ? "" : OutputPath(emb_dump).string();
      etc_embed_check_result result{};
      Check(etc_embed_check(image.get(), key.get(), &spec, emb_dim, emb_trials,
                            emb_seed, dump.empty() ? nullptr : dump.c_str(),
                            &result));
      std::printf("trials: %u\nmax deviation: %.3e\ntolerance: %.0e\nresult: %s\n",
                  result.trials, result.max_deviation, result.tolerance,
                  result.passed ? "PASS" : "FAIL");
      return result.passed ? kExitOk : kExitContract;
    }
    if (*compression) {
      const KeyPtr key = LoadKey(cmp_opts.key_path);
      const etc_cipher_spec spec = cmp_opts.Spec();
      const std::vector<int> qfs = ParseQualities(cmp_qf);
      etc_report* raw = nullptr;
      Check(etc_report_compression(cmp_corpus.c_str(), key.get(), &spec, qfs.data(),
                                   qfs.size(), cmp_opts.center_crop,
                                   cmp_opts.threads, &raw));
      const ReportPtr r(raw);
      return PrintReport(r.get(), cmp_json);
    }
    if (*leakage) {
      const KeyPtr key = LoadKey(leak_opts.key_path);
      const etc_cipher_spec spec = leak_opts.Spec();
      etc_report* raw = nullptr;
      Check(etc_report_leakage(leak_corpus.c_str(), key.get(), &spec,
                               leak_opts.center_crop, leak_opts.threads, &raw));
      const ReportPtr r(raw);
      return PrintReport(r.get(), leak_json);
    }
    if (*probe) {
      const KeyPtr key = LoadKey(probe_key);
      Check(etc_parse_steps(probe_steps.c_str(), &probe_cfg.steps));
      probe_cfg.corpus_dir = probe_corpus.empty() ? nullptr : probe_corpus.c_str();
      etc_report* raw = nullptr;
      Check(etc_probe_run(&probe_cfg, key.get(), &raw));
      const ReportPtr r(raw);
      return PrintReport(r.get(), probe_json);
    }
  } catch (const Failure& f) {
    std::cerr << "etc: " << f.message << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "etc: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
