#include "doctest.h"

#include "check_errc.hpp"
#include "gazesim/ingest.hpp"

using namespace gazesim;

namespace {

const char* kExport =
    "RECORDING_SESSION_LABEL,CURRENT_FIX_START,CURRENT_FIX_END,CURRENT_FIX_DURATION,CURRENT_FIX_X,CURRENT_FIX_Y\n"
    "an1,300,500,200,640.5,400\n"
    "an1,0,250,250,100,200\n"
    "an1,600,900,100,50,60\n"
    "an1,950,1000,50,.,.\n";

}  // namespace

TEST_CASE("fixation table: columns, ordering, duration repair") {
  const auto parsed = parse_fixation_table(kExport, "an1");
  REQUIRE(parsed.records.size() == 4);
  CHECK(parsed.records[0].start_ms == 0);
  CHECK(parsed.records[1].start_ms == 300);
  CHECK(parsed.records[1].x_px == 640.5);
  CHECK(parsed.records[2].duration_ms == 300);
  CHECK(parsed.warnings.size() == 1);
  CHECK_FALSE(parsed.records[3].has_position);
  CHECK(parsed.records[0].has_position);
}

TEST_CASE("fixation table: tab separated, extra columns ignored") {
  const auto parsed = parse_fixation_table(
      "CURRENT_FIX_Y\tfoo\tCURRENT_FIX_X\tCURRENT_FIX_START\tCURRENT_FIX_END\tCURRENT_FIX_DURATION\n"
      "10\tbar\t20\t5\t15\t10\n",
      "v");
  REQUIRE(parsed.records.size() == 1);
  CHECK(parsed.records[0].x_px == 20);
  CHECK(parsed.records[0].y_px == 10);
  CHECK(parsed.warnings.empty());
}

TEST_CASE("fixation table round trip") {
  const auto parsed = parse_fixation_table(kExport, "an1");
  const auto again = parse_fixation_table(write_fixation_table(parsed.records), "an1");
  CHECK(again.records == parsed.records);
  CHECK(parse_fixation_table(write_fixation_table(parsed.records, '\t'), "an1").records == parsed.records);
}

TEST_CASE("fixation table errors") {
  CHECK_ERRC(parse_fixation_table("CURRENT_FIX_START,CURRENT_FIX_END,CURRENT_FIX_X,CURRENT_FIX_Y\n", "v"),
             Errc::MissingColumn);
  try {
    parse_fixation_table("CURRENT_FIX_END,CURRENT_FIX_DURATION,CURRENT_FIX_X,CURRENT_FIX_Y\n", "v");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("CURRENT_FIX_START") != std::string::npos);
  }
  const std::string header = "CURRENT_FIX_START,CURRENT_FIX_END,CURRENT_FIX_DURATION,CURRENT_FIX_X,CURRENT_FIX_Y\n";
  CHECK_ERRC(parse_fixation_table(header + "1,2,1,3\n", "v"), Errc::MalformedRow);
  CHECK_ERRC(parse_fixation_table(header + "a,2,1,3,4\n", "v"), Errc::MalformedRow);
  CHECK_ERRC(parse_fixation_table(header + "5,5,0,3,4\n", "v"), Errc::MalformedRow);
  try {
    parse_fixation_table(header + "0,1,1,1,1\n\n9,2,1,3,4\n", "v");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("display coords give inclusive extents") {
  const auto g = parse_display_coords("MSG 10 GAZE_COORDS 0 0 1 1\nMSG\t11 DISPLAY_COORDS 0 0 1919 1079\n"
                                      "MSG 12 DISPLAY_COORDS 0 0 799 599\n");
  CHECK(g.width_px == 1920);
  CHECK(g.height_px == 1080);
  CHECK(parse_display_coords("DISPLAY_COORDS 10 20 109 219").width_px == 100);
  CHECK_ERRC(parse_display_coords("MSG 1 nothing here\n"), Errc::GeometryNotFound);
}

TEST_CASE("eeg parsing") {
  const auto rec = parse_eeg("Fz Cz\n1 2\n3 4\n5 6\n", 250.0, 40);
  CHECK(rec.channels == std::vector<std::string>{"Fz", "Cz"});
  CHECK(rec.sample_count() == 3);
  CHECK(rec.samples[2][1] == 6);
  CHECK(rec.time_ms(1) == 44.0);
  CHECK(rec.channel_index("Cz") == 1u);
  CHECK_FALSE(rec.channel_index("Pz").has_value());

  const auto anon = parse_eeg("1,2,3\n4,5,6\n", 500.0);
  CHECK(anon.channels == std::vector<std::string>{"ch01", "ch02", "ch03"});

  CHECK_ERRC(parse_eeg("1 2\n3\n", 100.0), Errc::RaggedRows);
  CHECK_ERRC(parse_eeg("a b\n", 100.0), Errc::EmptyInput);
  CHECK_ERRC(parse_eeg("", 100.0), Errc::EmptyInput);
  CHECK_ERRC(parse_eeg("1 2\n3 x\n", 100.0), Errc::MalformedRow);
  CHECK_ERRC(parse_eeg("1 2\n", 0.0), Errc::InvalidArgument);
}

TEST_CASE("answer sheet parsing") {
  const auto sheet = parse_answer_sheet("viewer,q1,q2,q3\nan1,1,0,true\nan2,false,TRUE,0\n");
  CHECK(sheet.question_ids == std::vector<std::string>{"q1", "q2", "q3"});
  CHECK(sheet.viewer_ids == std::vector<std::string>{"an1", "an2"});
  CHECK(sheet.correctness[0] == std::vector<bool>{true, false, true});
  CHECK(sheet.correctness[1] == std::vector<bool>{false, true, false});
  try {
    parse_answer_sheet("viewer,q1,q2\nan1,1,maybe\n");
    FAIL("accepted a non-boolean cell");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonBooleanCell);
    CHECK(std::string(e.what()).find("row 2, column 3") != std::string::npos);
  }
}

TEST_CASE("window segmentation drops the partial tail") {
  FixationSeries s;
  s.viewer_id = "a";
  s.frame_rate_fps = 32;
  for (int k = 0; k < 100; ++k) {
    s.xs.push_back(k);
    s.ys.push_back(-k);
    s.mask.push_back(true);
  }
  const auto windows = segment_windows(s, 1.0, 32.0);
  REQUIRE(windows.size() == 3);
  CHECK(windows[1].xs.front() == 32);
  CHECK(windows[2].size() == 32);
  CHECK(windows[1].start_ms == 1000);
  CHECK_ERRC(segment_windows(s, 0.0, 32.0), Errc::InvalidArgument);
}
