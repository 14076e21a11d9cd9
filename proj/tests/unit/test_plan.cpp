#include "roleplan/plan.hpp"

#include <doctest.h>

using namespace roleplan;

TEST_SUITE("plan") {

TEST_CASE("empty text has no steps and no residue") {
    const auto plan = parse_plan("");
    CHECK(plan.steps.empty());
    CHECK(plan.residue.empty());
    CHECK(plan.definitions.empty());
}

TEST_CASE("a three-line block yields three steps in order") {
    const auto plan = parse_plan("navigate_to(\"wooden panel\")\npick_up(\"Behr Painting Can\")\napply(\"Behr Painting Can\", \"wooden panel\")");
    REQUIRE(plan.steps.size() == 3);
    CHECK(plan.steps[0].function == "navigate_to");
    CHECK(plan.steps[1].function == "pick_up");
    CHECK(plan.steps[2].function == "apply");
    CHECK(plan.steps[0].args[0].value == "wooden panel");
    CHECK(plan.steps[2].args.size() == 2);
    CHECK(plan.steps[2].args[1].value == "wooden panel");
    CHECK(plan.steps[0].source_line == 1);
    CHECK(plan.steps[2].source_line == 3);
    CHECK(plan.residue.empty());
}

TEST_CASE("only the last fenced block is code; line numbers refer to the raw text") {
    const std::string raw = "Here is a draft:\n```\nspeak(\"draft\")\n```\nFinal version:\n```python\nrobot.pick_up('brush')\n# hold it\nset_light(color=\"green\")\n```\nDone.";
    const auto plan = parse_plan(raw);
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].function == "pick_up");
    CHECK(plan.steps[0].source_line == 7);
    CHECK(plan.steps[1].args[0].keyword == "color");
    CHECK(plan.steps[1].args[0].value == "green");
    CHECK(plan.steps[1].args[0].inferred_type == ParamType::color);
    CHECK(plan.steps[1].source_line == 9);
}

TEST_CASE("arguments are typed by their literal form") {
    const auto plan = parse_plan("move_to(1.5, 2.0)\nmove_to((0, 0))\nmove_to([1, 2, 3])\nplace(paint_can, target=\"wall\")\nspeak(\"The job is finished for today.\")");
    REQUIRE(plan.steps.size() == 5);
    CHECK(plan.steps[0].args.size() == 2);
    CHECK(plan.steps[0].args[0].numbers == std::vector<double>{1.5});
    CHECK(plan.steps[0].args[0].inferred_type == ParamType::number);
    CHECK(plan.steps[1].args[0].numbers == std::vector<double>{0, 0});
    CHECK(plan.steps[1].args[0].inferred_type == ParamType::position);
    CHECK(plan.steps[2].args[0].numbers.size() == 3);
    CHECK(plan.steps[3].args[0].value == "paint_can");
    CHECK(plan.steps[3].args[0].inferred_type == ParamType::object_ref);
    CHECK(plan.steps[3].args[1].raw_text == "target=\"wall\"");
    CHECK(plan.steps[4].args[0].inferred_type == ParamType::text);
}

TEST_CASE("prose lines become residue and are never steps") {
    const auto plan = parse_plan("First I look around.\npick_up(\"brush\")\nThen I am done");
    REQUIRE(plan.steps.size() == 1);
    REQUIRE(plan.residue.size() == 2);
    CHECK(plan.residue[0].source_line == 1);
    CHECK(plan.residue[1].text == "Then I am done");
}

TEST_CASE("control flow keywords and builtins are not actions") {
    const auto plan = parse_plan("for i in range(3):\n    print(i)\n    pick_up(\"tile\")\nif len(x) > 0:\n    place(\"tile\", \"floor\")");
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].function == "pick_up");
    CHECK(plan.steps[1].function == "place");
}

TEST_CASE("nested calls precede the call that consumes them") {
    const auto plan = parse_plan("place(detect_objects(), \"floor\")");
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].function == "detect_objects");
    CHECK(plan.steps[1].function == "place");
    CHECK(plan.steps[1].args[0].is_call);
}

TEST_CASE("a call spanning physical lines is one step at its first line") {
    const auto plan = parse_plan("apply(\n    \"grout\",\n    \"tiles\",\n)\nspeak(\"done\")");
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].source_line == 1);
    CHECK(plan.steps[0].args.size() == 2);
    CHECK(plan.steps[1].source_line == 5);
}

TEST_CASE("a local definition never invoked leaves its body unexecuted") {
    const auto plan = parse_plan("def helper():\n    pick_up(\"brush\")\nspeak(\"hello\")");
    REQUIRE(plan.definitions.size() == 1);
    CHECK(plan.definitions[0].name == "helper");
    CHECK(plan.definitions[0].source_line == 1);
    CHECK_FALSE(plan.definitions[0].invoked);
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].enclosing_definition == "helper");
    CHECK_FALSE(plan.steps[0].executed);
    CHECK(plan.steps[1].executed);
    CHECK(plan.defines("helper"));
}

TEST_CASE("invocation propagates through local definitions") {
    const auto plan = parse_plan("def a():\n    b()\ndef b():\n    pick_up(\"brush\")\ndef c():\n    c()\na()");
    REQUIRE(plan.definitions.size() == 3);
    CHECK(plan.definitions[0].invoked);
    CHECK(plan.definitions[1].invoked);
    CHECK_FALSE(plan.definitions[2].invoked);
    for (const auto& s : plan.steps) {
        if (s.function == "pick_up") CHECK(s.executed);
    }
}

TEST_CASE("serialize re-emits the code region") {
    const std::string raw = "Plan:\n```python\n# start\nnavigate_to(\"wall\")\n\n  pick_up(\"brush\")  \nall done\n```";
    const auto plan = parse_plan(raw);
    CHECK(serialize_plan(plan) == code_region(raw));
    CHECK(code_region(raw) == "# start\nnavigate_to(\"wall\")\npick_up(\"brush\")\nall done");
}

TEST_CASE("unbalanced text never throws") {
    CHECK_NOTHROW(parse_plan("pick_up(\"brush\"\nplace(((\n```\n\"unterminated"));
}

}
