// Builds the entity bundle for one text input of a hand-written page dump
// and prints the prompt document that would be sent to the model.
//
//   ./render_prompt            # uses a built-in sign-up page
//   ./render_prompt page.xml   # uses the first hint-missing input of a dump

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "hintgen/entities.hpp"
#include "hintgen/prompt.hpp"
#include "hintgen/vh.hpp"

namespace {

const char* kSignupPage = R"(<?xml version='1.0' encoding='UTF-8'?>
<hierarchy rotation="0">
  <node class="android.widget.FrameLayout" text="" resource-id="" bounds="[0,0][1080,1920]">
    <node class="android.widget.TextView" text="Create your account" resource-id="" bounds="[40,120][1040,240]"/>
    <node class="android.widget.EditText" text="Email" resource-id="app:id/email" bounds="[40,300][1040,420]"/>
    <node class="android.widget.EditText" text="Password" resource-id="app:id/password" bounds="[40,460][1040,580]"/>
    <node class="android.widget.Button" text="Sign up" resource-id="app:id/submit" bounds="[40,1650][1040,1770]"/>
  </node>
</hierarchy>)";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw hintgen::Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    using namespace hintgen;
    try {
        ViewHierarchy vh = argc > 1 ? parse_hierarchy(read_file(argv[1]), "Page", argv[1])
                                    : parse_hierarchy(kSignupPage, "SignUp", "<built-in>");

        AppInfo app{"demoapp", {"SignUp", "Home"}};
        PageInfo page = extract_page_info(vh);
        for (const NodePath& path : find_text_inputs(vh)) {
            const UiNode* node = resolve_path(vh, path);
            if (!node || has_hint(*node))
                continue;
            GuiEntityBundle b = bundle(app, page, extract_input_info(vh, path));
            std::cout << render(make_generation_document(b, {})) << "\n\n---\n\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
