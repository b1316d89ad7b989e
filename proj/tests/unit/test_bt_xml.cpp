#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hfsmbt/bt/error.hpp"
#include "hfsmbt/xml/bt_xml.hpp"

using namespace hfsmbt;
using namespace hfsmbt::xml;
using bt::BtNode;
using bt::NodeKind;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::filesystem::path> corpus() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(std::string(HFSMBT_FIXTURE_DIR) + "/behaviors")) {
        if (e.path().extension() == ".xml") {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

XmlErrc parse_error(const std::string& text) {
    try {
        (void)parse_bt_xml(text);
    } catch (const BtXmlError& e) {
        return e.code();
    }
    FAIL("expected BtXmlError");
    return XmlErrc::XmlSyntax;
}

std::string wrap(const std::string& body) {
    return "<root main_tree_to_execute=\"T\"><BehaviorTree ID=\"T\">" + body + "</BehaviorTree></root>";
}

bt::LeafRegistry registry_for(std::initializer_list<std::string> actions, std::initializer_list<std::string> conds) {
    bt::LeafRegistry reg;
    for (const auto& a : actions) {
        reg.register_action(a, [](bt::LeafContext&) { return bt::NodeStatus::Success; });
    }
    for (const auto& c : conds) {
        reg.register_condition(c, [](bt::LeafContext&) { return bt::NodeStatus::Success; });
    }
    return reg;
}

}  // namespace

TEST_CASE("hunger fallback document") {
    const auto doc = parse_bt_xml(
        R"(<root main_tree_to_execute="T"><BehaviorTree ID="T"><Fallback><Condition ID="NotHungry"/><Action ID="EatApple"/></Fallback></BehaviorTree></root>)");
    CHECK(doc.main_tree_id == "T");
    REQUIRE(doc.find("T") != nullptr);
    const BtNode& root = *doc.find("T");
    CHECK(root.kind() == NodeKind::Fallback);
    REQUIRE(root.children().size() == 2);
    CHECK(root.children()[0].kind() == NodeKind::Condition);
    CHECK(root.children()[0].id() == "NotHungry");
    CHECK(root.children()[1].id() == "EatApple");
}

TEST_CASE("single action document") {
    const auto doc = parse_bt_xml(wrap(R"(<Action ID="Go"/>)"));
    CHECK(doc.find("T")->kind() == NodeKind::Action);
    CHECK(doc.find("T")->children().empty());
}

TEST_CASE("ports become keys or literals") {
    const auto doc = parse_bt_xml(wrap(R"(<Action ID="Move" goal="{target}" speed="0.5" note="a &lt; b"/>)"));
    const auto& ports = doc.find("T")->ports();
    CHECK(ports.at("goal") == bt::PortValue::key("target"));
    CHECK(ports.at("speed") == bt::PortValue::literal("0.5"));
    CHECK(ports.at("note") == bt::PortValue::literal("a < b"));
}

TEST_CASE("structural errors") {
    CHECK(parse_error(wrap("<Parallel success_threshold=\"5\"><Action ID=\"A\"/><Action ID=\"B\"/><Action ID=\"C\"/></Parallel>")) ==
          XmlErrc::BadThreshold);
    CHECK(parse_error(wrap("<Parallel success_threshold=\"0\"><Action ID=\"A\"/></Parallel>")) == XmlErrc::BadThreshold);
    CHECK(parse_error(wrap("<Parallel><Action ID=\"A\"/></Parallel>")) == XmlErrc::MissingAttribute);
    CHECK(parse_error(wrap("<Retry num_attempts=\"x\"><Action ID=\"A\"/></Retry>")) == XmlErrc::BadAttribute);
    CHECK(parse_error(wrap("<Repeat num_cycles=\"0\"><Action ID=\"A\"/></Repeat>")) == XmlErrc::BadAttribute);
    CHECK(parse_error(wrap("<Retry num_attempts=\"2\"><Action ID=\"A\"/><Action ID=\"B\"/></Retry>")) ==
          XmlErrc::BadStructure);
    CHECK(parse_error(wrap("<Sequence/>")) == XmlErrc::BadStructure);
    CHECK(parse_error(wrap("<Action/>")) == XmlErrc::MissingAttribute);
    CHECK(parse_error(wrap("<Switch/>")) == XmlErrc::UnknownElement);
    CHECK(parse_error(wrap("<Sequence foo=\"1\"><Action ID=\"A\"/></Sequence>")) == XmlErrc::BadAttribute);
    CHECK(parse_error("<root><BehaviorTree ID=\"T\"><Action ID=\"A\"/></BehaviorTree></root>") ==
          XmlErrc::MissingAttribute);
    CHECK(parse_error("<root main_tree_to_execute=\"X\"><BehaviorTree ID=\"T\"><Action ID=\"A\"/></BehaviorTree></root>") ==
          XmlErrc::MissingAttribute);
    CHECK(parse_error("<root main_tree_to_execute=\"T\"><BehaviorTree ID=\"T\"><Action ID=\"A\"/></BehaviorTree>"
                      "<BehaviorTree ID=\"T\"><Action ID=\"B\"/></BehaviorTree></root>") == XmlErrc::DuplicateTree);
    CHECK(parse_error(wrap("<Action ID=\"A\"/><Action ID=\"B\"/>")) == XmlErrc::BadStructure);
}

TEST_CASE("syntax errors carry line and column") {
    try {
        (void)parse_bt_xml("<root main_tree_to_execute=\"T\">\n  <BehaviorTree ID=\"T\">\n    <Action ID=\"A\">\n  </BehaviorTree>\n</root>\n");
        FAIL("expected error");
    } catch (const BtXmlError& e) {
        CHECK(e.code() == XmlErrc::XmlSyntax);
        CHECK(e.line() == 4);
        CHECK(e.column() == 5);
    }
    try {
        (void)parse_bt_xml(wrap("\n<Bogus/>"));
    } catch (const BtXmlError& e) {
        CHECK(e.code() == XmlErrc::UnknownElement);
        CHECK(e.line() == 2);
        CHECK(e.column() == 1);
    }
    CHECK(parse_error("") == XmlErrc::XmlSyntax);
    CHECK(parse_error(wrap("<Action ID=\"A\" ID=\"B\"/>")) == XmlErrc::XmlSyntax);
    CHECK(parse_error(wrap("text<Action ID=\"A\"/>")) == XmlErrc::XmlSyntax);
    CHECK(parse_error(wrap("<Action ID=\"&bogus;\"/>")) == XmlErrc::XmlSyntax);
}

TEST_CASE("subtree references must resolve and be acyclic") {
    CHECK(parse_error(wrap("<SubTree ID=\"Missing\"/>")) == XmlErrc::DanglingSubTree);
    CHECK(parse_error("<root main_tree_to_execute=\"A\">"
                      "<BehaviorTree ID=\"A\"><SubTree ID=\"B\"/></BehaviorTree>"
                      "<BehaviorTree ID=\"B\"><Sequence><Action ID=\"X\"/><SubTree ID=\"A\"/></Sequence></BehaviorTree>"
                      "</root>") == XmlErrc::SubTreeCycle);
    CHECK(parse_error(wrap("<SubTree ID=\"T\"/>")) == XmlErrc::SubTreeCycle);

    const auto lib = parse_bt_xml("<root main_tree_to_execute=\"Lib\"><BehaviorTree ID=\"Lib\"><Action ID=\"L\"/></BehaviorTree></root>");
    const TreeLookup known = [&](const std::string& id) { return lib.find(id); };
    const auto doc = parse_bt_xml(wrap("<SubTree ID=\"Lib\" x=\"{y}\"/>"), known);
    const BtNode inst = instantiate("T", [&](const std::string& id) {
        const BtNode* t = doc.find(id);
        return t != nullptr ? t : lib.find(id);
    });
    CHECK(inst.kind() == NodeKind::SubTree);
    REQUIRE(inst.is_resolved_subtree());
    CHECK(inst.children().front().id() == "L");
}

TEST_CASE("serialize canonical forms") {
    const auto doc = parse_bt_xml(wrap(
        "<Parallel success_threshold=\"2\" name=\"P\"><Action zeta=\"1\" ID=\"X\" alpha=\"{k}\"/><Action ID=\"X\"/></Parallel>"));
    const std::string text = serialize(doc);
    CHECK(text.find("<Parallel name=\"P\" success_threshold=\"2\">") != std::string::npos);
    CHECK(text.find("<Action ID=\"X\" alpha=\"{k}\" zeta=\"1\"/>") != std::string::npos);
    CHECK(text.find("<Action ID=\"X\"/>") != std::string::npos);
    CHECK(text.rfind("</root>\n") == text.size() - 8);
}

TEST_CASE("fixture corpus round-trips and serializes byte-stably") {
    const auto files = corpus();
    REQUIRE(files.size() >= 6);
    for (const auto& f : files) {
        INFO(f.string());
        const auto first = parse_bt_xml(read_file(f));
        const std::string once = serialize(first);
        const auto second = parse_bt_xml(once);
        CHECK(first.structurally_equal(second));
        CHECK(serialize(second) == once);
    }
}

TEST_CASE("validate reports registry and port issues") {
    auto reg = registry_for({"EatApple"}, {"NotHungry"});
    CHECK(validate_xml(wrap("<Fallback><Condition ID=\"NotHungry\"/><Action ID=\"EatApple\"/></Fallback>"), reg).empty());

    const auto unreg = validate_xml(wrap("<Action ID=\"Nope\"/>"), reg);
    REQUIRE(unreg.size() == 1);
    CHECK(unreg[0].code == "UnregisteredLeaf");
    CHECK(unreg[0].subject == "Nope");

    const auto kind = validate_xml(wrap("<Action ID=\"NotHungry\"/>"), reg);
    REQUIRE(kind.size() == 1);
    CHECK(kind[0].code == "LeafKindMismatch");

    const auto threshold = validate_xml(
        wrap("<Parallel success_threshold=\"5\"><Action ID=\"EatApple\"/><Action ID=\"EatApple\"/><Action ID=\"EatApple\"/></Parallel>"),
        reg);
    REQUIRE(threshold.size() == 1);
    CHECK(threshold[0].code == "BadThreshold");

    reg.register_action("Move", [](bt::LeafContext&) { return bt::NodeStatus::Success; }, {},
                        {bt::PortSpec{"goal", bt::PortDirection::Input, true}});
    const auto port = validate_xml(wrap("<Action ID=\"Move\"/>"), reg);
    REQUIRE(port.size() == 1);
    CHECK(port[0].code == "MissingPortSource");
    CHECK(validate_xml(wrap("<Action ID=\"Move\" goal=\"1;2\"/>"), reg).empty());

    const auto syntax = validate_xml("<root", reg);
    REQUIRE(syntax.size() == 1);
    CHECK(syntax[0].code == "XmlSyntax");
}

TEST_CASE("mutated fixtures never escape as anything but structured errors") {
    const auto files = corpus();
    std::mt19937 rng(424242);
    const std::string alphabet = "<>/=\"{}&;# abcSequenceActionID-1";
    int parsed = 0;
    int rejected = 0;
    for (int i = 0; i < 3000; ++i) {
        std::string text = read_file(files[i % files.size()]);
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits && !text.empty(); ++e) {
            const std::size_t pos = rng() % text.size();
            switch (rng() % 3) {
                case 0:
                    text.erase(pos, 1 + rng() % 6);
                    break;
                case 1:
                    text.insert(pos, 1, alphabet[rng() % alphabet.size()]);
                    break;
                default:
                    text[pos] = alphabet[rng() % alphabet.size()];
            }
        }
        try {
            const auto doc = parse_bt_xml(text);
            for (const auto& [id, tree] : doc.trees) {
                CHECK(tree.size() >= 1);
            }
            ++parsed;
        } catch (const BtXmlError&) {
            ++rejected;
        } catch (const std::exception& ex) {
            FAIL_CHECK("unexpected exception: " << ex.what() << "\n" << text);
        }
    }
    CHECK(parsed + rejected == 3000);
    CHECK(rejected > 0);
}
