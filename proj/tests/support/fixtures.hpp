#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hintgen/detail/jsonl.hpp"
#include "hintgen/vh.hpp"

// Shared test fixtures: scratch directories, a deterministic toy word-vector
// table, and the synthetic corpora (generation, failing-first, audit, mining)
// used by both the unit tests and the acceptance runner. Everything here is
// generated at test time so the repository carries no binary-ish data files.

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                ("hintgen-" + tag + "-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec); // best effort
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    fs::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Toy word vectors. Small dimension, fixed seed, vocabulary skewed towards
// the labels the synthetic corpora use so retrieval has real signal.

inline const std::vector<std::string>& gui_vocab() {
    static const std::vector<std::string> vocab = {
        "enter",    "your",      "the",      "a",        "an",       "please",
        "city",     "name",      "email",    "address",  "phone",    "number",
        "username", "password",  "departure", "arrival", "date",     "travel",
        "passengers", "card",    "street",   "zip",      "code",     "age",
        "nickname", "company",   "website",  "flight",   "coupon",   "luggage",
        "weight",   "remarks",   "search",   "book",     "sign",     "up",
        "in",       "where",     "do",       "you",      "want",     "to",
        "go",       "from",      "destination", "origin", "query",   "input",
        "text",     "label",     "button",   "submit",   "next",     "done",
        "page",     "user",      "account",  "login",    "register", "first",
        "last",     "full",      "birth",    "day",      "month",    "year",
        "country",  "state",     "province", "district", "gender",   "title",
        "subject",  "message",   "comment",  "feedback", "amount",   "price",
        "quantity", "total",     "currency", "bank",     "branch",   "tax",
        "invoice",  "order",     "tracking", "ticket",   "seat",     "cabin",
        "hotel",    "room",      "guests",   "checkin",  "checkout", "nights",
        "station",  "train",     "bus",      "line",     "stop",     "route",
        "start",    "end",       "time",     "hour",     "minute",   "id",
        "passport", "visa",      "nationality", "language", "note",  "detail",
        "info",     "confirm",   "verify",   "otp",      "pin",      "security",
        "answer",   "question",  "school",   "grade",    "major",    "score",
        "field",    "below",     "fill",     "value",    "correct",  "which",
        "results",  "all",       "set",      "invalid",  "beijing",  "shanghai",
        "paris",    "main",      "profile",  "settings", "contact",  "sample",
    };
    return vocab;
}

// One vector per vocabulary word, components drawn from a fixed-seed RNG in
// [-1, 1] with four decimals. Byte-identical across runs.
inline std::string toy_embeddings_text(size_t dim = 48) {
    std::mt19937 rng(20240601u);
    std::string out;
    char buf[32];
    for (const std::string& word : gui_vocab()) {
        out += word;
        for (size_t d = 0; d < dim; ++d) {
            double v = (static_cast<int>(rng() % 20001u) - 10000) / 10000.0;
            std::snprintf(buf, sizeof(buf), " %.4f", v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline fs::path write_toy_embeddings(const fs::path& dir, size_t dim = 48) {
    fs::path path = dir / "vectors.txt";
    write_file(path, toy_embeddings_text(dim));
    return path;
}

// ---------------------------------------------------------------------------
// Page builders. Rows are stacked top to bottom like a plain form.

inline hintgen::Rect row_rect(int row) {
    return {40, 100 + row * 140, 1040, 100 + row * 140 + 120};
}

inline hintgen::UiNode text_row(const std::string& text, int row) {
    hintgen::UiNode n;
    n.class_name = "android.widget.TextView";
    n.text = text;
    n.bounds = row_rect(row);
    return n;
}

inline hintgen::UiNode edit_row(const std::string& label, const std::string& resource_id,
                                const std::string& hint, int row) {
    hintgen::UiNode n;
    n.class_name = "android.widget.EditText";
    n.text = label;
    n.resource_id = resource_id;
    n.hint = hint;
    n.bounds = row_rect(row);
    return n;
}

struct Row {
    bool input = false;
    std::string text;
    std::string resource_id; // inputs only
    std::string hint;        // inputs only
};

inline hintgen::ViewHierarchy rows_page(const std::string& activity,
                                        const std::vector<Row>& rows) {
    hintgen::ViewHierarchy vh;
    vh.activity_name = activity;
    vh.root.class_name = "android.widget.FrameLayout";
    vh.root.bounds = {0, 0, 1080, 1920};
    int row = 0;
    for (const Row& r : rows) {
        if (r.input)
            vh.root.children.push_back(edit_row(r.text, r.resource_id, r.hint, row));
        else
            vh.root.children.push_back(text_row(r.text, row));
        ++row;
    }
    return vh;
}

inline std::string manifest_xml(const std::string& package, const std::string& label,
                                const std::vector<std::string>& activities) {
    std::string xml = "<manifest package=\"" + package + "\">\n  <application android:label=\"" +
                      label + "\">\n";
    for (const std::string& a : activities)
        xml += "    <activity android:name=\"." + a + "\" />\n";
    xml += "  </application>\n</manifest>\n";
    return xml;
}

// ---------------------------------------------------------------------------
// Generation fixture: twenty single-input form pages, a simulator spec that
// accepts exactly one value per field, and a mock script keyed on each
// page's input line. Every page can pass in one round.

struct GenerateCase {
    std::string label;
    std::string hint;
    std::string content;
};

inline const std::vector<GenerateCase>& generate_cases() {
    static const std::vector<GenerateCase> cases = {
        {"City", "Enter the city name", "Beijing"},
        {"Email", "Enter your email address", "user@example.com"},
        {"Phone", "Enter your phone number", "13800138000"},
        {"Username", "Enter your username", "traveler01"},
        {"Password", "Enter your password", "s3cret pass"},
        {"Departure", "Enter the departure city", "Shanghai"},
        {"Arrival", "Enter the arrival city", "Paris"},
        {"Date", "Enter the travel date", "2024-06-01"},
        {"Passengers", "Enter the number of passengers", "2"},
        {"Card number", "Enter your card number", "4111111111111111"},
        {"Address", "Enter your street address", "12 Main Street"},
        {"Zip code", "Enter your zip code", "100080"},
        {"Age", "Enter your age", "30"},
        {"Nickname", "Enter your nickname", "sky"},
        {"Company", "Enter your company name", "Acme"},
        {"Website", "Enter your website", "example.com"},
        {"Flight number", "Enter the flight number", "CA1234"},
        {"Coupon", "Enter the coupon code", "SAVE10"},
        {"Luggage", "Enter the luggage weight", "20"},
        {"Remarks", "Enter any remarks", "none"},
    };
    return cases;
}

struct GenerateFixture {
    fs::path corpus_dir;
    fs::path sim_path;
    fs::path mock_path;
    fs::path refs_path; // reference hints, one per line, page order
};

inline std::string two_digits(size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02zu", i);
    return buf;
}

inline GenerateFixture write_generate_fixture(const fs::path& dir) {
    const std::vector<GenerateCase>& cases = generate_cases();
    GenerateFixture fx;
    fx.corpus_dir = dir / "corpus";
    fs::path app_dir = fx.corpus_dir / "travelbook";

    std::vector<std::string> activities;
    for (size_t i = 0; i < cases.size(); ++i)
        activities.push_back("Page" + two_digits(i + 1));
    write_file(app_dir / "manifest.xml",
               manifest_xml("com.example.travelbook", "TravelBook", activities));

    std::string refs;
    for (size_t i = 0; i < cases.size(); ++i) {
        std::string nn = two_digits(i + 1);
        hintgen::ViewHierarchy page =
            rows_page("Page" + nn, {{false, "Please fill in the field below", "", ""},
                                    {true, cases[i].label, "app:id/field" + nn, ""},
                                    {false, "Submit", "", ""}});
        write_file(app_dir / ("Page" + nn + ".xml"), hintgen::serialize_hierarchy(page));
        refs += cases[i].hint + "\n";
    }
    fx.refs_path = dir / "references.txt";
    write_file(fx.refs_path, refs);

    hintgen::detail::ojson spec;
    spec["version"] = 1;
    spec["app_name"] = "TravelBook";
    spec["initial_screen"] = "p01";
    spec["screens"] = hintgen::detail::ojson::array();
    for (size_t i = 0; i < cases.size(); ++i) {
        std::string nn = two_digits(i + 1);
        hintgen::detail::ojson screen;
        screen["id"] = "p" + nn;
        screen["activity"] = "Page" + nn;
        screen["statics"] = {"Please fill in the field below", "Submit"};
        hintgen::detail::ojson field;
        field["id"] = "field" + nn;
        field["label"] = cases[i].label;
        field["validator"] = {{"kind", "one_of"}, {"options", {cases[i].content}}};
        field["error_message"] = "Invalid value";
        field["transition"] = "done";
        screen["inputs"] = {field};
        spec["screens"].push_back(screen);
    }
    hintgen::detail::ojson done;
    done["id"] = "done";
    done["activity"] = "Done";
    done["statics"] = {"All set"};
    done["inputs"] = hintgen::detail::ojson::array();
    spec["screens"].push_back(done);
    fx.sim_path = dir / "sim.json";
    write_file(fx.sim_path, spec.dump(2) + "\n");

    std::string mock;
    for (const GenerateCase& c : cases) {
        hintgen::detail::ojson rule;
        rule["contains"] = "The text input of this page is \"" + c.label + "\"";
        rule["response"] =
            "the hint-text is \"" + c.hint + "\", the input content is \"" + c.content + "\".";
        mock += rule.dump() + "\n";
    }
    fx.mock_path = dir / "mock.jsonl";
    write_file(fx.mock_path, mock);
    return fx;
}

// ---------------------------------------------------------------------------
// Failing-first fixture: one page whose field only accepts "Beijing". The
// scripted backend answers "train" until the prompt carries the validation
// error, then answers "Beijing". Round 1 must fail, round 2 must pass.

struct FailingFirstFixture {
    fs::path corpus_dir;
    fs::path sim_path;
    fs::path mock_path;
    std::string error_message = "Please enter the correct city name";
};

inline FailingFirstFixture write_failing_first_fixture(const fs::path& dir) {
    FailingFirstFixture fx;
    fx.corpus_dir = dir / "corpus";
    fs::path app_dir = fx.corpus_dir / "cityquiz";

    write_file(app_dir / "manifest.xml",
               manifest_xml("com.example.cityquiz", "CityQuiz", {"SearchCity"}));
    hintgen::ViewHierarchy page =
        rows_page("SearchCity", {{false, "Which city do you want?", "", ""},
                                 {true, "City", "app:id/city_field", ""},
                                 {false, "Search", "", ""}});
    write_file(app_dir / "SearchCity.xml", hintgen::serialize_hierarchy(page));

    hintgen::detail::ojson spec;
    spec["version"] = 1;
    spec["app_name"] = "CityQuiz";
    spec["initial_screen"] = "s1";
    hintgen::detail::ojson s1;
    s1["id"] = "s1";
    s1["activity"] = "SearchCity";
    s1["statics"] = {"Which city do you want?", "Search"};
    hintgen::detail::ojson field;
    field["id"] = "city_field";
    field["label"] = "City";
    field["validator"] = {{"kind", "one_of"}, {"options", {"Beijing"}}};
    field["error_message"] = fx.error_message;
    field["transition"] = "results";
    s1["inputs"] = {field};
    hintgen::detail::ojson results;
    results["id"] = "results";
    results["activity"] = "Results";
    results["statics"] = {"Top sights"};
    results["inputs"] = hintgen::detail::ojson::array();
    spec["screens"] = {s1, results};
    fx.sim_path = dir / "sim.json";
    write_file(fx.sim_path, spec.dump(2) + "\n");

    hintgen::detail::ojson corrected;
    corrected["contains"] = fx.error_message;
    corrected["response"] =
        "the hint-text is \"Enter the city name\", the input content is \"Beijing\".";
    hintgen::detail::ojson fallback;
    fallback["default"] =
        "the hint-text is \"Enter the city\", the input content is \"train\".";
    fx.mock_path = dir / "mock.jsonl";
    write_file(fx.mock_path, corrected.dump() + "\n" + fallback.dump() + "\n");
    return fx;
}

// ---------------------------------------------------------------------------
// Audit fixture: one hundred apps with text inputs, the first
// `missing` of them with exactly one hintless input. Categories round-robin
// over four names.

struct AuditFixture {
    fs::path corpus_dir;
    fs::path category_path;
    size_t apps = 0;
    size_t missing = 0;
};

inline AuditFixture write_audit_fixture(const fs::path& dir, size_t apps = 100,
                                        size_t missing = 76) {
    AuditFixture fx;
    fx.apps = apps;
    fx.missing = missing;
    fx.corpus_dir = dir / "corpus";
    static const char* kCategories[] = {"finance", "shopping", "tools", "travel"};

    std::string category_map = "# app id -> category\n";
    char buf[16];
    for (size_t i = 0; i < apps; ++i) {
        std::snprintf(buf, sizeof(buf), "app%03zu", i);
        std::string app_id = buf;
        fs::path app_dir = fx.corpus_dir / app_id;
        write_file(app_dir / "manifest.xml",
                   manifest_xml("com.sample." + app_id, app_id, {"Main"}));

        std::vector<Row> rows = {{false, "Welcome", "", ""}};
        if (i < missing) {
            rows.push_back({true, "Search", "app:id/search", ""});
            rows.push_back({true, "Name", "app:id/name", "Enter your name"});
        } else {
            rows.push_back({true, "Name", "app:id/name", "Enter your name"});
        }
        write_file(app_dir / "Main.xml",
                   hintgen::serialize_hierarchy(rows_page("Main", rows)));
        category_map += app_id + std::string(" ") + kCategories[i % 4] + "\n";
    }
    fx.category_path = dir / "categories.txt";
    write_file(fx.category_path, category_map);
    return fx;
}

// ---------------------------------------------------------------------------
// Mining fixture: three apps, ten pages, seventeen hinted inputs with
// distinct content, plus three hintless inputs that mining must skip.

struct MiningFixture {
    fs::path corpus_dir;
    size_t hinted = 17;
};

inline MiningFixture write_mining_fixture(const fs::path& dir) {
    MiningFixture fx;
    fx.corpus_dir = dir / "corpus";

    struct PagePlan {
        const char* app;
        const char* activity;
        std::vector<Row> rows;
    };
    auto hinted = [](const std::string& label, const std::string& rid,
                     const std::string& hint) { return Row{true, label, rid, hint}; };
    auto bare = [](const std::string& label, const std::string& rid) {
        return Row{true, label, rid, ""};
    };

    const std::vector<PagePlan> plans = {
        {"flybook", "SearchFlight", {{false, "Find a flight", "", ""},
          hinted("From", "app:id/from", "Enter the departure city"),
          hinted("To", "app:id/to", "Enter the arrival city")}},
        {"flybook", "Passenger", {{false, "Passenger details", "", ""},
          hinted("First name", "app:id/first", "Enter your first name"),
          hinted("Last name", "app:id/last", "Enter your last name")}},
        {"flybook", "Payment", {{false, "Payment", "", ""},
          hinted("Card number", "app:id/card", "Enter your card number"),
          hinted("Cardholder", "app:id/holder", "Enter the cardholder name")}},
        {"flybook", "Coupons", {{false, "Coupons", "", ""},
          hinted("Coupon", "app:id/coupon", "Enter the coupon code"),
          hinted("Referral", "app:id/referral", "Enter the referral code")}},
        {"shoply", "SignUp", {{false, "Create account", "", ""},
          hinted("Email", "app:id/email", "Enter your email address"),
          hinted("Password", "app:id/password", "Enter your password")}},
        {"shoply", "Shipping", {{false, "Shipping", "", ""},
          hinted("Street", "app:id/street", "Enter your street address"),
          hinted("Zip", "app:id/zip", "Enter your zip code")}},
        {"shoply", "Profile", {{false, "Profile", "", ""},
          hinted("Nickname", "app:id/nick", "Enter your nickname"),
          hinted("Phone", "app:id/phone", "Enter your phone number"),
          bare("Bio", "app:id/bio")}},
        {"cityquiz", "SearchCity", {{false, "Which city?", "", ""},
          hinted("City", "app:id/city", "Enter the city name"),
          bare("Region", "app:id/region")}},
        {"cityquiz", "Quiz", {{false, "Your answer", "", ""},
          hinted("Answer", "app:id/answer", "Enter your answer")}},
        {"cityquiz", "Feedback", {{false, "Tell us more", "", ""},
          hinted("Comment", "app:id/comment", "Enter your comment"),
          bare("Contact", "app:id/contact")}},
    };

    for (const PagePlan& plan : plans)
        write_file(fx.corpus_dir / plan.app / (std::string(plan.activity) + ".xml"),
                   hintgen::serialize_hierarchy(rows_page(plan.activity, plan.rows)));

    write_file(fx.corpus_dir / "flybook" / "manifest.xml",
               manifest_xml("com.sample.flybook", "FlyBook",
                            {"SearchFlight", "Passenger", "Payment", "Coupons"}));
    write_file(fx.corpus_dir / "shoply" / "manifest.xml",
               manifest_xml("com.sample.shoply", "Shoply", {"SignUp", "Shipping", "Profile"}));
    write_file(fx.corpus_dir / "cityquiz" / "manifest.xml",
               manifest_xml("com.sample.cityquiz", "CityQuiz",
                            {"SearchCity", "Quiz", "Feedback"}));
    return fx;
}

} // namespace fixtures
