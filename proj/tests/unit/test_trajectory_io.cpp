#include <doctest.h>

#include <clocale>
#include <filesystem>
#include <random>
#include <sstream>

#include <unistd.h>

#include <navcurate/trajectory_io.hpp>

#include "oracles.hpp"

using namespace navcurate;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("navcurate_io_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

RawTrajectory parse_text(const std::string& text, double fps = 30.0) {
  std::istringstream in(text);
  return parse_pose_stream(in, "t", fps);
}

std::string random_word(std::mt19937_64& rng) {
  static const std::string chars = "abcdefghijklmnopqrstuvwxyz _-\"\\/";
  std::uniform_int_distribution<std::size_t> len(1, 12), pick(0, chars.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += chars[pick(rng)];
  return s;
}

double random_real(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  return u(rng);
}

BBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1000);
  double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  return {std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d)};
}

}  // namespace

TEST_CASE("pose lines") {
  const auto one = parse_text("0.0 0 0 0 0 0 0 1\n");
  REQUIRE(one.poses.size() == 1);
  CHECK(one.poses[0].position().norm() == 0);
  CHECK(one.poses[0].orientation().w() == 1);

  CHECK_THROWS_AS(parse_text("0.0 0 0 0 0 0 0 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_text("0 0 0 0 0 0 0 1\n0 1 0 0 0 0 0 1\n"), ValidationError);

  SUBCASE("comments and blank lines are skipped") {
    const auto t = parse_text("# header\n\n0 0 0 0 0 0 0 1\n# mid\n0.5 1 2 3 0 0 0 1\n");
    REQUIRE(t.poses.size() == 2);
    CHECK(t.poses[1].position().z() == 3);
  }

  SUBCASE("malformed lines carry their line number") {
    for (const char* bad : {"0 0 0 0 0 0 1\n", "0 0 0 0 0 0 0 1 9\n", "0  0 0 0 0 0 0 1\n", "0 0 0 x 0 0 0 1\n",
                            "0 0 0 0 0 0 0 nan\n", "0,5 0 0 0 0 0 0 1\n", "0 0 0 0 0 0 0 1 \n"}) {
      try {
        parse_text(std::string("# c\n") + bad);
        FAIL("accepted: " << bad);
      } catch (const ParseError& e) {
        CHECK(e.line() == 2);
      }
    }
  }

  SUBCASE("format round-trips exactly") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 500; ++i) {
      const Pose p = oracle::random_pose(rng, std::abs(random_real(rng)));
      const auto back = parse_text(format_pose_line(p) + "\n").poses.at(0);
      REQUIRE(back.timestamp() == p.timestamp());
      REQUIRE(back.position() == p.position());
      REQUIRE(std::abs(back.orientation().dot(p.orientation()) - 1.0) < 1e-15);
    }
  }

  SUBCASE("parsing ignores the C locale") {
    const char* old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
      CHECK(parse_text("0.5 1.25 0 0 0 0 0 1\n").poses[0].position().x() == 1.25);
      CHECK(format_pose_line(Pose(0.5, Eigen::Vector3d(1.25, 0, 0), Eigen::Quaterniond::Identity())).find(',') ==
            std::string::npos);
    }
    std::setlocale(LC_NUMERIC, saved.c_str());
  }
}

TEST_CASE("pose files") {
  TempDir dir;
  std::vector<Pose> poses;
  for (int i = 0; i < 3600; ++i) poses.emplace_back(i / 30.0, Eigen::Vector3d(i, 0, 0), Eigen::Quaterniond::Identity());
  write_pose_file(dir / "walk.txt", poses);
  const auto t = parse_pose_file(dir / "walk.txt", 30.0);
  CHECK(t.id == "walk");
  CHECK(t.poses.size() == 3600);
  CHECK(std::abs(t.duration() - 3599.0 / 30) < 1e-9);
  CHECK(parse_pose_file(dir / "walk.txt", 30.0, "other").id == "other");
  CHECK_THROWS_AS(parse_pose_file(dir / "missing.txt", 30.0), IoError);
}

TEST_CASE("detections") {
  TempDir dir;
  write_text_file(dir / "empty.jsonl", "");
  CHECK(parse_detections(dir / "empty.jsonl").empty());

  const std::string box = R"({"bbox":[0,0,1,1],"label":"person","score":0.9})";
  write_text_file(dir / "d.jsonl", "{\"detections\":[" + box + "," + box + "],\"frame\":5}\n" +
                                       "{\"detections\":[],\"frame\":2}\n" + "{\"detections\":[" + box + "," + box +
                                       "," + box + "],\"frame\":5}\n");
  const auto frames = parse_detections(dir / "d.jsonl");
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].frame == 2);
  CHECK(frames[1].frame == 5);
  CHECK(frames[1].detections.size() == 5);

  for (const char* bad : {R"({"detections":[{"bbox":[0,0,1,1],"label":"person","score":1.2}],"frame":1})",
                          R"({"detections":[{"bbox":[2,0,1,1],"label":"person","score":0.5}],"frame":1})",
                          R"({"detections":[],"frame":-1})", R"({"detections":[]})",
                          R"({"detections":[],"frame":1,"extra":0})", R"({"detections":[],"frame":1.5})",
                          R"(not json)"}) {
    write_text_file(dir / "bad.jsonl", std::string("{\"detections\":[],\"frame\":0}\n") + bad + "\n");
    try {
      parse_detections(dir / "bad.jsonl");
      FAIL("accepted: " << bad);
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
}

TEST_CASE("landmarks") {
  TempDir dir;
  write_text_file(dir / "empty.jsonl", "");
  CHECK(parse_landmarks(dir / "empty.jsonl").empty());

  write_text_file(dir / "m.jsonl", R"({"bbox":[0,0,1,1],"clip_id":"a","goal_frame":3,"name":"n"})" "\n");
  CHECK_THROWS_AS(parse_landmarks(dir / "m.jsonl"), ParseError);
  write_text_file(dir / "e.jsonl",
                  R"({"bbox":[0,0,1,1],"clip_id":"a","goal_frame":3,"instruction":"","name":"n"})" "\n");
  CHECK_THROWS_AS(parse_landmarks(dir / "e.jsonl"), ValidationError);

  const LandmarkAnnotation lm{"clip_0001", 42, {1.5, 2, 3.25, 4}, "red door", "walk to the red door"};
  const std::string line = to_line(lm);
  CHECK(to_line(landmark_from_line(line)) == line);
  CHECK(landmark_from_line(line) == lm);
}

TEST_CASE("record round trips") {
  std::mt19937_64 rng(77);
  TempDir dir;
  std::uniform_int_distribution<int> small(0, 5), count(1, 9);
  std::uniform_real_distribution<double> unit(0, 1);

  std::vector<TrainingSample> samples;
  std::vector<PredictionRecord> preds;
  std::vector<LandmarkAnnotation> landmarks;
  std::vector<DetectionFrame> detections;
  for (int i = 0; i < 100; ++i) {
    TrainingSample s;
    s.sample_id = random_word(rng);
    s.clip_id = random_word(rng);
    s.instruction = random_word(rng);
    s.t = small(rng) * 100;
    s.t_g = s.t + small(rng);
    for (int k = count(rng); k > 0; --k) s.history_frames.push_back(small(rng));
    for (int k = count(rng); k > 0; --k) s.waypoints.push_back({random_real(rng), random_real(rng)});
    s.arrival = small(rng) % 2;
    samples.push_back(s);

    PredictionRecord p;
    p.sample_id = random_word(rng);
    const int k = count(rng);
    for (int j = 0; j < k; ++j) {
      p.predicted.push_back({random_real(rng), random_real(rng)});
      p.ground_truth.push_back({random_real(rng), random_real(rng)});
    }
    if (small(rng) % 2) p.predicted_arrival = unit(rng);
    if (small(rng) % 2) p.arrival_label = small(rng) % 2 == 0;
    preds.push_back(p);

    landmarks.push_back({random_word(rng), small(rng), random_box(rng), random_word(rng), random_word(rng)});

    DetectionFrame f;
    f.frame = i;
    for (int j = small(rng); j > 0; --j) f.detections.push_back({random_word(rng), random_box(rng), unit(rng)});
    detections.push_back(f);
  }

  write_samples(samples, dir / "s.jsonl");
  CHECK(parse_samples(dir / "s.jsonl") == samples);
  write_predictions(preds, dir / "p.jsonl");
  CHECK(parse_predictions(dir / "p.jsonl") == preds);
  write_landmarks(landmarks, dir / "l.jsonl");
  CHECK(parse_landmarks(dir / "l.jsonl") == landmarks);
  write_detections(detections, dir / "d.jsonl");
  CHECK(parse_detections(dir / "d.jsonl") == detections);

  // byte identity of a second write
  write_samples(parse_samples(dir / "s.jsonl"), dir / "s2.jsonl");
  CHECK(read_text_file(dir / "s.jsonl") == read_text_file(dir / "s2.jsonl"));
}

TEST_CASE("prediction records are validated") {
  CHECK_THROWS_AS(prediction_from_line(R"({"ground_truth":[[0,0]],"predicted":[],"sample_id":"a"})"), ParseError);
  CHECK_THROWS_AS(prediction_from_line(R"({"ground_truth":[[0,0]],"predicted":[[0,0],[1,1]],"sample_id":"a"})"),
                  ParseError);
  CHECK_THROWS_AS(
      prediction_from_line(R"({"ground_truth":[[0,0]],"predicted":[[0,0]],"predicted_arrival":1.5,"sample_id":"a"})"),
      ParseError);
  const auto ok = prediction_from_line(R"({"ground_truth":[[0,0]],"predicted":[[1,2]],"sample_id":"a"})");
  CHECK_FALSE(ok.predicted_arrival.has_value());
  CHECK(ok.predicted[0] == EgoWaypoint{1, 2});
}

TEST_CASE("filter reports") {
  TempDir dir;
  FilterReport empty;
  write_report(empty, dir / "empty.json");
  const Json doc = read_json_file(dir / "empty.json");
  CHECK(doc.at("counts").at("clips") == 0);
  CHECK(doc.at("counts").at("accepted") == 0);
  CHECK(doc.at("counts").at("rejected") == 0);

  FilterReport r;
  FilterVerdict ok;
  ok.clip_id = "a_0000";
  FilterVerdict bad;
  bad.clip_id = "a_0001";
  bad.accepted = false;
  bad.reasons = {RejectReason::PitchRange};
  bad.diagnostics.pitch_range_deg = 20;
  bad.diagnostics.max_divergence_deg = std::nan("");
  r.verdicts = {ok, bad};
  write_report(r, dir / "r.json");
  const Json rd = read_json_file(dir / "r.json");
  CHECK(rd.at("verdicts")[1].at("clip_id") == "a_0001");
  CHECK(rd.at("verdicts")[1].at("reasons")[0] == "pitch_range");
  CHECK(rd.at("verdicts")[1].at("diagnostics").at("max_divergence_deg").is_null());
  CHECK(rd.at("counts").at("rejected_by_reason").at("pitch_range") == 1);

  const auto back = parse_filter_report(dir / "r.json");
  REQUIRE(back.verdicts.size() == 2);
  CHECK(std::isnan(back.verdicts[1].diagnostics.max_divergence_deg));
  write_report(back, dir / "r2.json");
  CHECK(read_text_file(dir / "r.json") == read_text_file(dir / "r2.json"));
}

TEST_CASE("configs") {
  FilterConfig f;
  f.pitch_range_max_deg = 12.5;
  f.person_label = "pedestrian";
  CHECK(filter_config_from_json(to_json(f)) == f);
  CHECK(filter_config_from_json(Json::object()) == FilterConfig{});
  CHECK_THROWS_AS(filter_config_from_json(Json{{"pitch_max", 3}}), ParseError);

  SamplerConfig s;
  s.seed = 0xffffffffffffffffull;
  s.arrival_fraction = 0.25;
  CHECK(sampler_config_from_json(to_json(s)) == s);

  AxisConvention c{Axis::NegY, Axis::PosY};
  CHECK(axis_convention_from_json(to_json(c)) == c);

  LossWeights w{0.5, 2, 0, 1};
  CHECK(loss_weights_from_json(to_json(w)) == w);

  const auto bundle = oracle_corpus_spec();
  CHECK(to_json(synth_bundle_spec_from_json(to_json(bundle))) == to_json(bundle));
}
