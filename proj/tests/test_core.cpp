#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "generators.hpp"
#include "gseq/io.hpp"
#include "gseq/types.hpp"
#include "gseq/util.hpp"

using namespace gseq;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / ("gseq_core_" + name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("alphabet validates codes") {
    CHECK_THROWS_AS(GestureAlphabet({"p"}), ValidationError);
    CHECK_THROWS_AS(GestureAlphabet({"p", "p"}), ValidationError);
    CHECK_THROWS_AS(GestureAlphabet({"p", "X"}), ValidationError);
    CHECK_THROWS_AS(GestureAlphabet({"p", "a_b"}), ValidationError);

    const auto& dom = GestureAlphabet::dominant10();
    CHECK(dom.size() == 10);
    CHECK(dom.codes() == std::vector<std::string>{"c", "h", "k", "m", "p", "r", "s", "a", "g", "e"});
    CHECK(dom.index_of("p") == 4);
    CHECK_FALSE(dom.index_of("z").has_value());
}

TEST_CASE("make_sequence sorts and validates") {
    const auto& alpha = GestureAlphabet::dominant10();
    auto seq = make_sequence("v", {{"s", 2.0, 3.0, false}, {"p", 0.0, 2.0, false}}, alpha);
    CHECK(seq.events.front().label == "p");
    CHECK(seq.span() == doctest::Approx(3.0));

    CHECK_THROWS_AS(make_sequence("v", {{"p", 5.0, 4.0, false}}, alpha), ValidationError);
    CHECK_THROWS_AS(make_sequence("v", {{"zz", 0.0, 1.0, false}}, alpha), ValidationError);
    // excluded events may carry any label
    CHECK_NOTHROW(make_sequence("v", {{"zz", 0.0, 1.0, true}}, alpha));
}

TEST_CASE("gesture file parsing") {
    const auto& alpha = GestureAlphabet::dominant10();

    SUBCASE("two events") {
        const auto path = temp_file("ok.csv", "gesture,start,end\np,0.0,2.0\ns,2.0,3.5\n");
        const auto seq = read_gesture_file(path, alpha);
        CHECK(seq.events.size() == 2);
        CHECK(seq.span() == doctest::Approx(3.5));
        CHECK(seq.case_id == "gseq_core_ok");
    }
    SUBCASE("empty file is an error") {
        const auto path = temp_file("empty.csv", "");
        CHECK_THROWS_WITH_AS(read_gesture_file(path, alpha), doctest::Contains("no events"), ParseError);
    }
    SUBCASE("header only is an error") {
        const auto path = temp_file("hdr.csv", "gesture,start,end\n");
        CHECK_THROWS_AS(read_gesture_file(path, alpha), ParseError);
    }
    SUBCASE("end before start") {
        const auto path = temp_file("rev.csv", "gesture,start,end\np,5.0,4.0\n");
        CHECK_THROWS_AS(read_gesture_file(path, alpha), ValidationError);
    }
    SUBCASE("malformed row reports its line") {
        const auto path = temp_file("bad.csv", "gesture,start,end\np,0.0,2.0\ns,zzz,3.0\n");
        CHECK_THROWS_WITH_AS(read_gesture_file(path, alpha), doctest::Contains(":3"), ParseError);
    }
    SUBCASE("X rows are kept but excluded") {
        const auto path = temp_file("x.csv", "gesture,start,end\np,0,2\nX,2,3\ns,3,4\n");
        const auto seq = read_gesture_file(path, alpha);
        CHECK(seq.events.size() == 3);
        CHECK(seq.events[1].excluded);
        CHECK(seq.without_excluded().events.size() == 2);
    }
    SUBCASE("unknown class rejected unless mapped") {
        const auto path = temp_file("unk.csv", "gesture,start,end\nq,0,1\np,1,2\n");
        CHECK_THROWS_AS(read_gesture_file(path, alpha), ParseError);
        ParseOptions opts;
        opts.map_unknown_to_excluded = true;
        const auto seq = read_gesture_file(path, alpha, opts);
        CHECK(seq.events[0].excluded);
        CHECK(seq.events[0].label == "q");
    }
}

TEST_CASE("probability file parsing") {
    GestureAlphabet tiny({"p", "s"});

    SUBCASE("uniform rows") {
        std::string text = "t";
        for (const auto& c : GestureAlphabet::dominant10().codes()) text += "," + c;
        text += "\n";
        for (int i = 0; i < 2; ++i) {
            text += format_double(0.1667 * i);
            for (int c = 0; c < 10; ++c) text += ",0.1";
            text += "\n";
        }
        const auto path = temp_file("probs.csv", text);
        const auto stream = read_probability_file(path, GestureAlphabet::dominant10());
        CHECK(stream.frames() == 2);
        CHECK(stream.dt == doctest::Approx(0.1667));
        CHECK(stream.row(0)[0] == doctest::Approx(0.1));
    }
    SUBCASE("row slightly off renormalizes") {
        const auto path = temp_file("renorm.csv", "t,p,s\n0,0.5005,0.5\n0.1,0.5,0.5\n");
        const auto stream = read_probability_file(path, tiny);
        const double sum = stream.row(0)[0] + stream.row(0)[1];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("row far off is an error") {
        const auto path = temp_file("offsum.csv", "t,p,s\n0,0.7,0.5\n0.1,0.5,0.5\n");
        CHECK_THROWS_AS(read_probability_file(path, tiny), ValidationError);
    }
    SUBCASE("negative probability is an error") {
        const auto path = temp_file("neg.csv", "t,p,s\n0,-0.01,1.01\n0.1,0.5,0.5\n");
        CHECK_THROWS_AS(read_probability_file(path, tiny), ValidationError);
    }
    SUBCASE("permuted columns map onto the expected alphabet") {
        const auto path = temp_file("perm.csv", "t,s,p\n0,0.2,0.8\n0.1,0.3,0.7\n");
        const auto stream = read_probability_file(path, tiny);
        CHECK(stream.alphabet.codes() == std::vector<std::string>{"p", "s"});
        CHECK(stream.row(0)[0] == doctest::Approx(0.8));
        CHECK(stream.row(0)[1] == doctest::Approx(0.2));
    }
    SUBCASE("single row needs a fallback dt") {
        const auto path = temp_file("single.csv", "t,p,s\n0,0.5,0.5\n");
        CHECK_THROWS_AS(read_probability_file(path, tiny), ParseError);
        const auto stream = read_probability_file(path, tiny, 0.25);
        CHECK(stream.dt == doctest::Approx(0.25));
    }
    SUBCASE("non-uniform spacing is an error") {
        const auto path = temp_file("jitter.csv", "t,p,s\n0,0.5,0.5\n0.1,0.5,0.5\n0.35,0.5,0.5\n");
        CHECK_THROWS_AS(read_probability_file(path, tiny), ValidationError);
    }
}

TEST_CASE("outcome file parsing") {
    SUBCASE("valid") {
        const auto path = temp_file("out.csv", "case_id,outcome\nv1,0\nv2,1\n");
        const auto table = read_outcome_file(path);
        CHECK(table.entries.size() == 2);
        CHECK(table.entries.at("v2") == 1);
    }
    SUBCASE("outcome outside {0,1}") {
        const auto path = temp_file("out2.csv", "case_id,outcome\nv1,2\n");
        CHECK_THROWS_AS(read_outcome_file(path), ValidationError);
    }
    SUBCASE("duplicate case") {
        const auto path = temp_file("out3.csv", "case_id,outcome\nv1,0\nv1,1\n");
        CHECK_THROWS_AS(read_outcome_file(path), ValidationError);
    }
}

TEST_CASE("round trip is byte-identical for canonical files") {
    Rng rng(71);
    const auto alpha = GestureAlphabet::dominant10();
    const auto seq = testgen::random_sequence(rng, 60, alpha);
    const auto gpath = fs::temp_directory_path() / "gseq_core_rt.gestures.csv";
    write_gesture_file(gpath, seq);
    const auto reread = read_gesture_file(gpath, alpha);
    CHECK(serialize_gesture_file(reread) == serialize_gesture_file(seq));
    CHECK(reread.case_id == "gseq_core_rt");

    auto stream = testgen::random_stream(rng, 40, 4);
    const auto ppath = fs::temp_directory_path() / "gseq_core_rt.probs.csv";
    write_probability_file(ppath, stream);
    const auto stream2 = read_probability_file(ppath);
    CHECK(serialize_probability_file(stream2) == serialize_probability_file(stream));

    OutcomeTable table;
    table.entries = {{"a", 1}, {"b", 0}};
    CHECK(serialize_outcome_file(table) == "case_id,outcome\na,1\nb,0\n");
}

TEST_CASE("frame_labels basics") {
    const auto& alpha = GestureAlphabet::dominant10();
    const int p = 4, s = 6;

    SUBCASE("covering events") {
        const auto seq = make_sequence("v", {{"p", 0, 2, false}, {"s", 2, 4, false}}, alpha);
        const auto labels = frame_labels(seq, alpha, 1.0, 0.0, 4);
        CHECK(labels == std::vector<int>{p, p, s, s});
    }
    SUBCASE("gap leaves frames unlabeled") {
        const auto seq = make_sequence("v", {{"p", 0, 2, false}}, alpha);
        const auto labels = frame_labels(seq, alpha, 1.0, 0.0, 3);
        CHECK(labels == std::vector<int>{p, p, kUnlabeledFrame});
    }
    SUBCASE("overlap resolves to the later-starting event") {
        const auto seq = make_sequence("v", {{"p", 0, 3, false}, {"s", 2, 4, false}}, alpha);
        const auto labels = frame_labels(seq, alpha, 0.5, 0.0, 8);
        CHECK(labels[5] == s);  // t = 2.5
        CHECK(labels[3] == p);  // t = 1.5
    }
    SUBCASE("excluded events occupy time but stay unlabeled") {
        const auto seq = make_sequence("v", {{"p", 0, 2, false}, {"X", 2, 3, true}}, alpha);
        const auto labels = frame_labels(seq, alpha, 1.0, 0.0, 3);
        CHECK(labels == std::vector<int>{p, p, kUnlabeledFrame});
    }
    SUBCASE("output length always equals n") {
        Rng rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            const auto seq = testgen::random_sequence(rng, 1 + rng.uniform_index(30), alpha);
            const std::size_t n = 1 + rng.uniform_index(100);
            CHECK(frame_labels(seq, alpha, 0.25, 0.0, n).size() == n);
        }
    }
}

TEST_CASE("atomic write replaces content") {
    const auto path = fs::temp_directory_path() / "gseq_atomic.txt";
    atomic_write_file(path, "first");
    atomic_write_file(path, "second");
    CHECK(read_text_file(path) == "second");
}
