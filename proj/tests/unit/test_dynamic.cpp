#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "doctest.h"
#include "expect.hpp"
#include "ransd/common/io.hpp"
#include "ransd/dynamic/batch.hpp"
#include "ransd/dynamic/normalize.hpp"
#include "ransd/dynamic/report.hpp"
#include "ransd/dynamic/vocabulary.hpp"
#include "ransd/pe/batch.hpp"

using namespace ransd;
using namespace ransd::dynamic;
using namespace ransd::testing;

namespace {

const char* kFixture = R"({
  "info": {"score": 9.1},
  "behavior": {
    "apistats": {"1204": {"NtCreateFile": 12, "CryptEncrypt": 400}, "1300": {"NtCreateFile": 1}},
    "summary": {
      "regkey_deleted": [
        "HKEY_CURRENT_USER\\Software\\Foo\\A",
        "HKCU\\Software\\Foo\\B",
        "hkey_current_user\\software\\foo\\c"
      ],
      "regkey_written": ["HKEY_LOCAL_MACHINE\\SOFTWARE\\Run\\x"],
      "regkey_opened": ["HKEY_USERS\\S-1-5-21-1-2-3-1001\\Software\\Bar"],
      "file_written": ["C:\\Users\\alice\\Documents\\thesis.DOCX.locked"],
      "file_read": [{"path": "C:/Windows//System32/drivers/etc/hosts"}],
      "directory_created": ["C:\\Users\\Public\\tmp\\"],
      "dll_loaded": ["kernel32.dll", "ADVAPI32.dll", "kernel32.dll"],
      "unknown_key": [1, 2, 3]
    }
  },
  "network": {"domains": [{"domain": "Pay.Example.Onion", "ip": "1.2.3.4"}]},
  "dropped": [{"name": "readme.TXT"}],
  "strings": ["Your files are encrypted", "  "]
})";

std::set<Token> token_set(const BehaviorReport& r) {
  auto t = report_tokens(r);
  return {t.begin(), t.end()};
}

BehaviorReport random_report(std::mt19937_64& rng) {
  static const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g", "h"};
  auto pick = [&](std::size_t max) {
    std::vector<std::string> out;
    std::uniform_int_distribution<std::size_t> n(0, max);
    std::uniform_int_distribution<std::size_t> idx(0, pool.size() - 1);
    for (std::size_t i = n(rng); i > 0; --i) out.push_back(pool[idx(rng)]);
    return out;
  };
  BehaviorReport r;
  r.api_calls = pick(4);
  for (auto& ops : r.registry_ops) ops = pick(2);
  for (auto& ops : r.file_ops) {
    for (auto& s : pick(2)) ops.push_back("\\dir\\" + s + "." + s);
  }
  r.dirs_created = pick(2);
  r.net_domains = pick(1);
  r.drop_extensions = pick(2);
  r.strings = pick(3);
  r.dlls = pick(3);
  return r;
}

// Document frequencies counted straight from the report fields.
std::map<Token, std::size_t> naive_df(const std::vector<BehaviorReport>& reports) {
  std::map<Token, std::size_t> df;
  for (const auto& r : reports) {
    std::set<Token> seen;
    for (const auto& s : r.api_calls) seen.insert({Category::Api, s});
    for (OpKind k : kOpKinds) {
      for (const auto& s : r.registry(k)) seen.insert({Category::Registry, std::string(to_string(k)) + ":" + s});
      for (const auto& s : r.files(k)) {
        seen.insert({Category::File, std::string(to_string(k)) + ":" + s});
        seen.insert({Category::Extension, file_extension(s)});
      }
    }
    for (const auto& s : r.dirs_created) seen.insert({Category::Directory, s});
    for (const auto& s : r.drop_extensions) seen.insert({Category::Drop, s});
    for (const auto& s : r.dlls) seen.insert({Category::Dll, s});
    for (const auto& s : r.strings) seen.insert({Category::String, s});
    for (const auto& s : r.net_domains) seen.insert({Category::String, "domain:" + s});
    for (const auto& t : seen) ++df[t];
  }
  return df;
}

}  // namespace

TEST_CASE("registry keys fold hive spellings and user SIDs") {
  CHECK(normalize_registry_key("HKEY_LOCAL_MACHINE\\Software\\X") == "hklm\\software\\x");
  CHECK(normalize_registry_key("HKLM\\\\Software//X\\") == "hklm\\software\\x");
  CHECK(normalize_registry_key("\\REGISTRY\\MACHINE\\System") == "hklm\\system");
  CHECK(normalize_registry_key("HKEY_USERS\\S-1-5-21-11-22-33-1000\\Software\\Y") == "hkcu\\software\\y");
  CHECK(normalize_registry_key("HKEY_USERS\\S-1-5-21-11-22-33-1000_Classes\\.txt") ==
        "hkcu\\software\\classes\\.txt");
  CHECK(normalize_registry_key("HKEY_USERS\\.DEFAULT\\Control") == "hku\\.default\\control");
  CHECK(normalize_registry_key("HKEY_CLASSES_ROOT\\exefile") == "hkcr\\exefile");
  CHECK(normalize_registry_key("  \t ") == "");
}

TEST_CASE("paths drop volume letters and user profile roots") {
  CHECK(normalize_path("C:\\Users\\Bob\\AppData\\x.exe") == "%userprofile%\\appdata\\x.exe");
  CHECK(normalize_path("\\??\\D:/Documents and Settings/ann/a.txt") == "%userprofile%\\a.txt");
  CHECK(normalize_path("C:\\Users\\Public\\a") == "\\users\\public\\a");
  CHECK(normalize_path("C:\\Windows\\\\System32\\") == "\\windows\\system32");
  CHECK(file_extension("\\a\\b.tar.GZ") == "gz");
  CHECK(file_extension("\\a.b\\noext") == "");
  CHECK(file_extension("trailing.") == "");
}

TEST_CASE("parse_report errors") {
  CHECK_ERROR_KIND(parse_report("{}"), ErrorKind::MissingBehaviorSection);
  CHECK_ERROR_KIND(parse_report(R"({"behavior": {}})"), ErrorKind::MissingBehaviorSection);
  CHECK_ERROR_KIND(parse_report(R"({"behavior": {"summary": []}})"), ErrorKind::MissingBehaviorSection);
  CHECK_ERROR_KIND(parse_report("[1, 2"), ErrorKind::MalformedJson);
  CHECK_ERROR_KIND(parse_report(""), ErrorKind::MalformedJson);
  const auto empty = parse_report(R"({"behavior": {"summary": {}}})");
  CHECK(report_tokens(empty).empty());
}

TEST_CASE("fixture report fields keep order and multiplicity") {
  const auto r = parse_report(kFixture);
  CHECK(registry_sequence(r, OpKind::Delete) ==
        std::vector<std::string>{"hkcu\\software\\foo\\a", "hkcu\\software\\foo\\b", "hkcu\\software\\foo\\c"});
  CHECK(registry_sequence(r, OpKind::Write) == std::vector<std::string>{"hklm\\software\\run\\x"});
  CHECK(registry_sequence(r, OpKind::Create) == std::vector<std::string>{"hkcu\\software\\bar"});
  CHECK(registry_sequence(r, OpKind::Read).empty());
  CHECK(r.dlls == std::vector<std::string>{"kernel32.dll", "advapi32.dll", "kernel32.dll"});
  CHECK(r.api_calls == std::vector<std::string>{"ntcreatefile", "cryptencrypt", "ntcreatefile"});
  CHECK(r.files(OpKind::Write) == std::vector<std::string>{"%userprofile%\\documents\\thesis.docx.locked"});
  CHECK(r.files(OpKind::Read) == std::vector<std::string>{"\\windows\\system32\\drivers\\etc\\hosts"});
  CHECK(r.dirs_created == std::vector<std::string>{"\\users\\public\\tmp"});
  CHECK(r.net_domains == std::vector<std::string>{"pay.example.onion"});
  CHECK(r.drop_extensions == std::vector<std::string>{"txt"});
  CHECK(r.strings == std::vector<std::string>{"your files are encrypted"});

  const auto tokens = token_set(r);
  CHECK(tokens.count({Category::Extension, "locked"}) == 1);
  CHECK(tokens.count({Category::String, "domain:pay.example.onion"}) == 1);
  CHECK(tokens.count({Category::Registry, "delete:hkcu\\software\\foo\\b"}) == 1);
  CHECK(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.category == Category::Dll; }) == 2);
}

TEST_CASE("report_to_json round trips through parse_report") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_report(rng);
    const auto back = parse_report(report_to_json(r));
    CHECK(back.api_calls.size() == r.api_calls.size());
    CHECK(std::is_permutation(back.api_calls.begin(), back.api_calls.end(), r.api_calls.begin()));
    CHECK(back.registry_ops == r.registry_ops);
    CHECK(back.file_ops == r.file_ops);
    CHECK(back.dirs_created == r.dirs_created);
    CHECK(back.net_domains == r.net_domains);
    CHECK(back.drop_extensions == r.drop_extensions);
    CHECK(back.strings == r.strings);
    CHECK(back.dlls == r.dlls);
  }
}

TEST_CASE("vocabulary thresholds and ordering") {
  BehaviorReport one;
  one.dlls = {"b.dll", "a.dll"};
  const auto v1 = TokenVocabulary::build(std::vector<BehaviorReport>{one}, 1);
  REQUIRE(v1.size() == 2);
  CHECK(v1.entry(0).text == "a.dll");
  CHECK(v1.entry(1).text == "b.dll");
  CHECK(v1.feature_name(1) == "dll:b.dll");

  std::vector<BehaviorReport> ten(10);
  ten[3].strings = {"x"};
  ten[8].strings = {"x"};
  ten[0].strings = {"y"};
  for (auto& r : ten) r.api_calls = {"common"};
  const auto v3 = TokenVocabulary::build(ten, 3);
  CHECK(v3.size() == 1);
  CHECK(!v3.index_of({Category::String, "x"}));
  CHECK(TokenVocabulary::build(ten, 2).index_of({Category::String, "x"}).has_value());

  CHECK_ERROR_KIND(TokenVocabulary::build(std::vector<BehaviorReport>{}, 1), ErrorKind::EmptyCorpus);
  CHECK_ERROR_KIND(TokenVocabulary::from_entries({{Category::Api, "a"}, {Category::Api, "a"}}), ErrorKind::Format);
}

TEST_CASE("vocabulary equals the naive document-frequency filter") {
  std::mt19937_64 rng(11);
  for (std::size_t min_df : {1u, 2u, 3u}) {
    std::vector<BehaviorReport> reports;
    for (int i = 0; i < 5; ++i) reports.push_back(random_report(rng));
    const auto vocab = TokenVocabulary::build(reports, min_df);
    std::vector<Token> expected;
    for (const auto& [t, n] : naive_df(reports))
      if (n >= min_df && !t.text.empty()) expected.push_back(t);
    CHECK(vocab.entries() == expected);

    for (std::size_t i = 0; i < vocab.size(); ++i) CHECK(vocab.index_of(vocab.entry(i)) == i);
    std::array<std::size_t, kCategoryCount> counts{};
    for (const auto& t : expected) ++counts[static_cast<std::size_t>(t.category)];
    CHECK(vocab.category_counts() == counts);

    const auto text = vocab.to_text();
    CHECK(TokenVocabulary::from_text(text).entries() == vocab.entries());
    CHECK(TokenVocabulary::build(reports, min_df).to_text() == text);
  }
}

TEST_CASE("vectorize is binary presence over the vocabulary") {
  BehaviorReport base;
  base.dlls = {"a.dll", "b.dll", "a.dll"};
  base.strings = {"s"};
  const auto vocab = TokenVocabulary::build(std::vector<BehaviorReport>{base}, 1);

  CHECK(vectorize(BehaviorReport{}, vocab).active.empty());
  BehaviorReport probe;
  probe.dlls = {"a.dll", "z.dll"};
  probe.strings = {"s"};
  const auto v = vectorize(probe, vocab);
  CHECK(v.dimension == vocab.size());
  CHECK(v.active == std::vector<std::size_t>{*vocab.index_of({Category::Dll, "a.dll"}),
                                             *vocab.index_of({Category::String, "s"})});

  std::mt19937_64 rng(5);
  std::vector<BehaviorReport> corpus;
  for (int i = 0; i < 20; ++i) corpus.push_back(random_report(rng));
  const auto big = TokenVocabulary::build(std::span(corpus).first(10), 2);
  for (const auto& r : corpus) {
    const auto x = vectorize(r, big);
    CHECK(std::is_sorted(x.active.begin(), x.active.end()));
    CHECK(std::adjacent_find(x.active.begin(), x.active.end()) == x.active.end());
    CHECK(vectorize(r, big).active == x.active);
    std::set<Token> expected;
    for (const auto& t : token_set(r))
      if (big.index_of(t)) expected.insert(t);
    const auto decoded = decode(x, big);
    CHECK(std::set<Token>(decoded.begin(), decoded.end()) == expected);

    // Adding a token never switches an index off.
    BehaviorReport more = r;
    more.strings.push_back("a");
    const auto y = vectorize(more, big);
    CHECK(std::includes(y.active.begin(), y.active.end(), x.active.begin(), x.active.end()));
  }
}

TEST_CASE("batch extraction of report fixtures") {
  CHECK_ERROR_KIND(batch_extract_dynamic({}), ErrorKind::EmptyCorpus);

  TempDir dir("dyn_batch");
  std::vector<BehaviorReport> reports(4);
  reports[0].dlls = {"a.dll"};
  reports[0].label = Label::Malicious;
  reports[1].dlls = {"b.dll"};
  reports[1].label = Label::Benign;
  reports[2].dlls = {"a.dll", "c.dll"};
  reports[3].strings = {"held out"};
  const auto manifest_path = write_report_corpus(dir.path(), reports);
  auto manifest = read_manifest(manifest_path);
  REQUIRE(manifest.size() == 4);

  // Vocabulary comes from the first three rows only.
  const auto ds = batch_extract_dynamic(manifest, 1, {true, true, true, false});
  CHECK(ds.ledger.empty());
  REQUIRE(ds.rows.size() == 4);
  CHECK(ds.vocabulary.size() == 3);
  CHECK(ds.rows[0].features.label == Label::Malicious);
  CHECK(ds.rows[1].features.label == Label::Benign);
  CHECK(!ds.rows[2].features.label);
  CHECK(ds.rows[3].features.active.empty());
  CHECK(ds.rows[2].features.active.size() == 2);

  std::ostringstream sparse;
  write_sparse_dataset(sparse, ds.rows);
  io::write_text(dir.path() / "sparse.csv", sparse.str());
  const auto back = read_sparse_dataset((dir.path() / "sparse.csv").string(), ds.vocabulary.size());
  REQUIRE(back.size() == ds.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].path == ds.rows[i].path);
    CHECK(back[i].features.active == ds.rows[i].features.active);
    CHECK(back[i].features.label == ds.rows[i].features.label);
  }

  io::write_text(dir.path() / "broken.json", "{\"behavior\": ");
  manifest.push_back({(dir.path() / "broken.json").string(), Label::Benign});
  manifest.push_back({(dir.path() / "missing.json").string(), Label::Benign});
  const auto with_bad = batch_extract_dynamic(manifest, 1);
  CHECK(with_bad.rows.size() == 4);
  REQUIRE(with_bad.ledger.size() == 2);
  CHECK(with_bad.ledger[0].error.find("MalformedJson") != std::string::npos);
  CHECK_ERROR_KIND(batch_extract_dynamic(manifest, 1, {true}), ErrorKind::LengthMismatch);
}
