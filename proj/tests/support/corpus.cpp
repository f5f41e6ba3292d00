#include "corpus.hpp"

#include <fstream>
#include <random>

#include "ransd/common/io.hpp"

namespace ransd::testing {
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("ransd_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

PlantedCorpus make_planted_corpus(std::uint64_t seed, std::size_t per_class) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  PlantedCorpus corpus;
  for (int j = 0; j < 10; ++j)
    corpus.planted_keys.push_back("hkcu\\software\\locker\\setting" + std::to_string(j));
  corpus.delete_sequence = {"hkcu\\software\\microsoft\\windows\\currentversion\\run\\updater",
                            "hklm\\system\\currentcontrolset\\services\\vss",
                            "hkcu\\software\\classes\\.docx"};

  const std::vector<std::string> apis = {"ntcreatefile", "ntreadfile", "ntwritefile", "ldrloaddll",
                                         "regopenkeyexw", "ntclose", "getsysteminfo", "ntdelayexecution",
                                         "cryptacquirecontextw", "findfirstfileexw", "ntallocatevirtualmemory",
                                         "getcomputernamew"};
  const std::vector<std::string> dlls = {"c:\\windows\\system32\\kernel32.dll", "c:\\windows\\system32\\advapi32.dll",
                                         "c:\\windows\\system32\\crypt32.dll", "c:\\windows\\system32\\ws2_32.dll",
                                         "c:\\windows\\system32\\shell32.dll"};
  const std::vector<std::string> exts = {"txt", "tmp", "dat", "log", "ini"};

  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool malicious = i < per_class;
    dynamic::BehaviorReport r;
    r.label = malicious ? Label::Malicious : Label::Benign;
    for (const auto& api : apis)
      if (coin(rng)) r.api_calls.push_back(api);
    for (const auto& dll : dlls)
      if (chance(0.6)) r.dlls.push_back(dll);
    for (int k = 0; k < 40; ++k)
      if (chance(0.25)) r.registry(dynamic::OpKind::Read).push_back("hklm\\software\\vendor\\shared" + std::to_string(k));
    for (int k = 0; k < 20; ++k)
      if (chance(0.3)) r.registry(dynamic::OpKind::Create).push_back("hkcu\\software\\app\\key" + std::to_string(k));
    for (int k = 0; k < 30; ++k)
      if (chance(0.3))
        r.files(dynamic::OpKind::Write).push_back("c:\\users\\user\\appdata\\local\\temp\\f" + std::to_string(k) + "." +
                                                 exts[static_cast<std::size_t>(k) % exts.size()]);
    for (int k = 0; k < 10; ++k)
      if (chance(0.3)) r.dirs_created.push_back("c:\\programdata\\cache" + std::to_string(k));
    for (int k = 0; k < 10; ++k)
      if (chance(0.3)) r.strings.push_back("token" + std::to_string(k));
    if (chance(0.3)) r.net_domains.push_back("update.example.com");
    if (chance(0.3)) r.drop_extensions.push_back("exe");

    for (const auto& key : corpus.planted_keys)
      if (chance(malicious ? 0.9 : 0.1)) r.registry(dynamic::OpKind::Write).push_back(key);
    auto& deletes = r.registry(dynamic::OpKind::Delete);
    if (malicious) {
      for (int rep = 0; rep < 2; ++rep)
        deletes.insert(deletes.end(), corpus.delete_sequence.begin(), corpus.delete_sequence.end());
    } else {
      for (int k = 0; k < 3; ++k)
        deletes.push_back("hkcu\\software\\tool" + std::to_string(i) + "\\entry" + std::to_string(k));
    }
    corpus.reports.push_back(std::move(r));
  }
  return corpus;
}

fs::path write_report_corpus(const fs::path& dir, const std::vector<dynamic::BehaviorReport>& reports) {
  fs::create_directories(dir / "reports");
  std::string manifest = "path,label\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string name = "reports/r" + std::to_string(i) + ".json";
    io::write_text(dir / name, dynamic::report_to_json(reports[i]));
    manifest += name + "," + (reports[i].label ? std::string(to_string(*reports[i].label)) : "") + "\n";
  }
  io::write_text(dir / "manifest.csv", manifest);
  return dir / "manifest.csv";
}

fs::path write_binary_corpus(const fs::path& dir, const std::vector<std::vector<std::uint8_t>>& files,
                             const std::vector<std::string>& labels) {
  fs::create_directories(dir / "bin");
  std::string manifest = "path,label\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = "bin/s" + std::to_string(i) + ".exe";
    std::ofstream out(dir / name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(files[i].data()), static_cast<std::streamsize>(files[i].size()));
    manifest += name + "," + labels[i] + "\n";
  }
  io::write_text(dir / "manifest.csv", manifest);
  return dir / "manifest.csv";
}

}  // namespace ransd::testing
