// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#include "gmd/motion_data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "gmd/errors.hpp"
#include "gmd/rng.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "GMDS payloads are little-endian; big-endian hosts need byte swaps");

namespace gmd {

namespace {

constexpr double kPi = 3.14159265358979323846;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw ValidationError(std::string("gmds: truncated while reading ") + what);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

bool all_finite(const std::vector<float>& v) {
    return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

}  // namespace

void Skeleton::validate() const {
    if (joint_count < 1) throw ValidationError("skeleton: joint_count must be >= 1");
    if (fps <= 0.0) throw ValidationError("skeleton: fps must be > 0");
    if (static_cast<int>(joint_names.size()) != joint_count) {
        throw ValidationError("skeleton: joint_names length must equal joint_count");
    }
}

int Skeleton::find_joint(const std::string& joint_name) const {
    for (int i = 0; i < static_cast<int>(joint_names.size()); ++i) {
        if (joint_names[i] == joint_name) return i;
    }
    return -1;
}

Skeleton Skeleton::named(const std::string& skeleton_name) {
    Skeleton s;
    s.name = skeleton_name;
    s.fps = 30.0;
    if (skeleton_name == "synth7") {
        s.joint_names = {"pelvis", "neck", "head", "left_hand", "right_hand", "left_foot", "right_foot"};
    } else if (skeleton_name == "mogaze21") {
        s.joint_names = {"base",           "pelvis",         "torso",   "neck",    "head",
                         "linnerShoulder", "lShoulder",      "lElbow",  "lWrist",  "rinnerShoulder",
                         "rShoulder",      "rElbow",         "rWrist",  "lHip",    "lKnee",
                         "lAnkle",         "lToe",           "rHip",    "rKnee",   "rAnkle",
                         "rToe"};
    } else if (skeleton_name == "gimo23") {
        s.joint_names = {"pelvis",     "left_hip",       "right_hip",      "spine1",     "left_knee",
                         "right_knee", "spine2",         "left_ankle",     "right_ankle", "spine3",
                         "left_foot",  "right_foot",     "neck",           "left_collar", "right_collar",
                         "head",       "left_shoulder",  "right_shoulder", "left_elbow",  "right_elbow",
                         "left_wrist", "right_wrist",    "jaw"};
    } else {
        throw ValidationError("unknown skeleton name: " + skeleton_name);
    }
    s.joint_count = static_cast<int>(s.joint_names.size());
    return s;
}

std::vector<std::pair<int, int>> Skeleton::bones(const Skeleton& s) {
    auto link = [&s](const char* a, const char* b, std::vector<std::pair<int, int>>& out) {
        const int ia = s.find_joint(a);
        const int ib = s.find_joint(b);
        if (ia >= 0 && ib >= 0) out.emplace_back(ia, ib);
    };
    std::vector<std::pair<int, int>> bones;
    if (s.name == "synth7") {
        link("pelvis", "neck", bones);
        link("neck", "head", bones);
        link("neck", "left_hand", bones);
        link("neck", "right_hand", bones);
        link("pelvis", "left_foot", bones);
        link("pelvis", "right_foot", bones);
    } else if (s.name == "mogaze21") {
        const char* chain[][2] = {{"base", "pelvis"},     {"pelvis", "torso"},   {"torso", "neck"},
                                  {"neck", "head"},       {"torso", "linnerShoulder"},
                                  {"linnerShoulder", "lShoulder"}, {"lShoulder", "lElbow"},
                                  {"lElbow", "lWrist"},   {"torso", "rinnerShoulder"},
                                  {"rinnerShoulder", "rShoulder"}, {"rShoulder", "rElbow"},
                                  {"rElbow", "rWrist"},   {"base", "lHip"},      {"lHip", "lKnee"},
                                  {"lKnee", "lAnkle"},    {"lAnkle", "lToe"},    {"base", "rHip"},
                                  {"rHip", "rKnee"},      {"rKnee", "rAnkle"},   {"rAnkle", "rToe"}};
        for (auto& c : chain) link(c[0], c[1], bones);
    } else if (s.name == "gimo23") {
        const char* chain[][2] = {{"pelvis", "left_hip"},      {"pelvis", "right_hip"},
                                  {"pelvis", "spine1"},        {"spine1", "spine2"},
                                  {"spine2", "spine3"},        {"spine3", "neck"},
                                  {"neck", "head"},            {"head", "jaw"},
                                  {"left_hip", "left_knee"},   {"left_knee", "left_ankle"},
                                  {"left_ankle", "left_foot"}, {"right_hip", "right_knee"},
                                  {"right_knee", "right_ankle"}, {"right_ankle", "right_foot"},
                                  {"spine3", "left_collar"},   {"left_collar", "left_shoulder"},
                                  {"left_shoulder", "left_elbow"}, {"left_elbow", "left_wrist"},
                                  {"spine3", "right_collar"},  {"right_collar", "right_shoulder"},
                                  {"right_shoulder", "right_elbow"}, {"right_elbow", "right_wrist"}};
        for (auto& c : chain) link(c[0], c[1], bones);
    }
    return bones;
}

int MotionSample::num_frames() const {
    const std::size_t per_frame = static_cast<std::size_t>(skeleton.joint_count) * 3;
    return per_frame == 0 ? 0 : static_cast<int>(poses.size() / per_frame);
}

MotionSample MotionSample::slice(int begin, int len) const {
    const int j = skeleton.joint_count;
    MotionSample out;
    out.skeleton = skeleton;
    out.subject_id = subject_id;
    out.sequence_id = sequence_id;
    out.poses.assign(poses.begin() + static_cast<std::size_t>(begin) * j * 3,
                     poses.begin() + static_cast<std::size_t>(begin + len) * j * 3);
    out.gaze.assign(gaze.begin() + static_cast<std::size_t>(begin) * 3,
                    gaze.begin() + static_cast<std::size_t>(begin + len) * 3);
    return out;
}

void MotionSample::validate() const {
    skeleton.validate();
    const int j = skeleton.joint_count;
    if (poses.empty() || poses.size() % (static_cast<std::size_t>(j) * 3) != 0) {
        throw ValidationError("motion sample: pose payload is not [T, j, 3]");
    }
    const int t_frames = num_frames();
    if (t_frames < 1) throw ValidationError("motion sample: needs at least one frame");
    if (gaze.size() != static_cast<std::size_t>(t_frames) * 3) {
        throw ValidationError("motion sample: gaze payload is not [T, 3]");
    }
    if (!all_finite(poses) || !all_finite(gaze)) {
        throw ValidationError("motion sample: non-finite values");
    }
    for (int t = 0; t < t_frames; ++t) {
        const double gx = gaze[t * 3 + 0], gy = gaze[t * 3 + 1], gz = gaze[t * 3 + 2];
        const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
        if (std::abs(norm - 1.0) > 1e-4) {
            throw ValidationError("motion sample: gaze not unit at frame " + std::to_string(t));
        }
    }
}

void DatasetManifest::validate() const {
    if (history < 1 || future < 0 || stride_train < 1 || stride_eval < 1) {
        throw ValidationError("manifest: window parameters must be positive");
    }
    std::set<std::string> train(train_subjects.begin(), train_subjects.end());
    for (const auto& s : test_subjects) {
        if (train.count(s)) throw ValidationError("manifest: subject in both train and test: " + s);
    }
}

std::string DatasetManifest::to_json() const {
    nlohmann::json j;
    j["train_subjects"] = train_subjects;
    j["test_subjects"] = test_subjects;
    j["history"] = history;
    j["future"] = future;
    j["stride_train"] = stride_train;
    j["stride_eval"] = stride_eval;
    return j.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("manifest: bad JSON: ") + e.what());
    }
    DatasetManifest m;
    m.train_subjects = j.value("train_subjects", std::vector<std::string>{});
    m.test_subjects = j.value("test_subjects", std::vector<std::string>{});
    m.history = j.value("history", 15);
    m.future = j.value("future", 60);
    m.stride_train = j.value("stride_train", 1);
    m.stride_eval = j.value("stride_eval", 15);
    m.validate();
    return m;
}

void write_gmds(const MotionSample& sample, const std::string& path) {
    sample.validate();
    nlohmann::json header;
    header["joint_count"] = sample.skeleton.joint_count;
    header["joint_names"] = sample.skeleton.joint_names;
    header["fps"] = sample.skeleton.fps;
    header["num_frames"] = sample.num_frames();
    header["subject_id"] = sample.subject_id;
    header["sequence_id"] = sample.sequence_id;
    header["skeleton_name"] = sample.skeleton.name;
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("gmds: cannot open for writing: " + path);
    out.write("GMDS", 4);
    write_u32(out, 1);
    write_u32(out, static_cast<std::uint32_t>(header_text.size()));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    out.write(reinterpret_cast<const char*>(sample.poses.data()),
              static_cast<std::streamsize>(sample.poses.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(sample.gaze.data()),
              static_cast<std::streamsize>(sample.gaze.size() * sizeof(float)));
    if (!out) throw NumericError("gmds: write failed: " + path);
}

MotionSample read_gmds(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericError("gmds: cannot open: " + path);
    char magic[4];
    if (!in.read(magic, 4)) throw ValidationError("gmds: truncated magic");
    if (std::memcmp(magic, "GMDS", 4) != 0) throw ValidationError("gmds: bad magic");
    const std::uint32_t version = read_u32(in, "version");
    if (version != 1) throw ValidationError("gmds: unsupported version " + std::to_string(version));
    const std::uint32_t header_len = read_u32(in, "header length");
    if (header_len == 0 || header_len > (1u << 20)) throw ValidationError("gmds: implausible header length");
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), header_len)) throw ValidationError("gmds: truncated header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("gmds: bad header JSON: ") + e.what());
    }

    MotionSample sample;
    try {
        sample.skeleton.joint_count = header.at("joint_count").get<int>();
        sample.skeleton.joint_names = header.at("joint_names").get<std::vector<std::string>>();
        sample.skeleton.fps = header.at("fps").get<double>();
        sample.subject_id = header.at("subject_id").get<std::string>();
        sample.sequence_id = header.at("sequence_id").get<std::string>();
        sample.skeleton.name = header.value("skeleton_name", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("gmds: missing header field: ") + e.what());
    }
    const int t_frames = header.at("num_frames").get<int>();
    if (t_frames < 1) throw ValidationError("gmds: num_frames must be >= 1");

    const std::size_t pose_count = static_cast<std::size_t>(t_frames) * sample.skeleton.joint_count * 3;
    const std::size_t gaze_count = static_cast<std::size_t>(t_frames) * 3;
    sample.poses.resize(pose_count);
    sample.gaze.resize(gaze_count);
    if (!in.read(reinterpret_cast<char*>(sample.poses.data()),
                 static_cast<std::streamsize>(pose_count * sizeof(float)))) {
        throw ValidationError("gmds: pose payload shorter than declared shape");
    }
    if (!in.read(reinterpret_cast<char*>(sample.gaze.data()),
                 static_cast<std::streamsize>(gaze_count * sizeof(float)))) {
        throw ValidationError("gmds: gaze payload shorter than declared shape");
    }
    char extra;
    if (in.read(&extra, 1)) throw ValidationError("gmds: trailing bytes after payload");
    sample.validate();
    return sample;
}

MotionSample convert_csv(const std::string& csv_path, const Skeleton& skeleton) {
    skeleton.validate();
    std::ifstream in(csv_path);
    if (!in) throw NumericError("csv: cannot open: " + csv_path);

    const int expected_fields = 1 + skeleton.joint_count * 3 + 3;
    MotionSample sample;
    sample.skeleton = skeleton;
    sample.sequence_id = csv_path;

    std::string line;
    int line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;

        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) fields.push_back(cell);
        if (!line.empty() && line.back() == ',') fields.push_back("");

        if (first_content_line) {
            first_content_line = false;
            char* end = nullptr;
            std::strtod(fields[0].c_str(), &end);
            const bool numeric = end != fields[0].c_str();
            if (!numeric) continue;  // header row
        }
        if (static_cast<int>(fields.size()) != expected_fields) {
            throw ValidationError("csv: line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(expected_fields));
        }

        std::vector<double> values(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            char* end = nullptr;
            values[i] = std::strtod(fields[i].c_str(), &end);
            if (end == fields[i].c_str() || !std::isfinite(values[i])) {
                throw ValidationError("csv: line " + std::to_string(line_no) +
                                      " field " + std::to_string(i) + " is not a finite number");
            }
        }
        for (int k = 0; k < skeleton.joint_count * 3; ++k) {
            sample.poses.push_back(static_cast<float>(values[1 + k]));
        }
        const double gx = values[1 + skeleton.joint_count * 3 + 0];
        const double gy = values[1 + skeleton.joint_count * 3 + 1];
        const double gz = values[1 + skeleton.joint_count * 3 + 2];
        const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
        if (norm < 1e-12) {
            throw ValidationError("csv: line " + std::to_string(line_no) + " gaze has zero norm");
        }
        sample.gaze.push_back(static_cast<float>(gx / norm));
        sample.gaze.push_back(static_cast<float>(gy / norm));
        sample.gaze.push_back(static_cast<float>(gz / norm));
    }
    if (sample.poses.empty()) throw ValidationError("csv: no data rows in " + csv_path);
    sample.validate();
    return sample;
}

std::vector<Window> make_windows(const MotionSample& sample, int history, int future, int stride) {
    if (history < 1 || future < 0 || stride < 1) {
        throw ValidationError("make_windows: history/future/stride out of range");
    }
    const int t_frames = sample.num_frames();
    const int j = sample.skeleton.joint_count;
    std::vector<Window> windows;
    if (history + future > t_frames) return windows;

    const int count = (t_frames - history - future) / stride + 1;
    windows.reserve(count);
    for (int w = 0; w < count; ++w) {
        const int start = w * stride;
        Window win;
        win.history = history;
        win.future = future;
        win.observed = sample.slice(start, history);
        const int fstart = start + history;
        win.future_gt.assign(sample.poses.begin() + static_cast<std::size_t>(fstart) * j * 3,
                             sample.poses.begin() + static_cast<std::size_t>(fstart + future) * j * 3);
        win.future_gaze.assign(sample.gaze.begin() + static_cast<std::size_t>(fstart) * 3,
                               sample.gaze.begin() + static_cast<std::size_t>(fstart + future) * 3);
        windows.push_back(std::move(win));
    }
    return windows;
}

namespace {

struct JointRoles {
    int pelvis = -1, neck = -1, head = -1;
    int left_hand = -1, right_hand = -1, left_foot = -1, right_foot = -1;
    std::vector<int> other;
};

JointRoles assign_roles(const Skeleton& s) {
    JointRoles r;
    r.pelvis = s.find_joint("pelvis");
    r.neck = s.find_joint("neck");
    r.head = s.find_joint("head");
    r.left_hand = s.find_joint("left_hand");
    r.right_hand = s.find_joint("right_hand");
    r.left_foot = s.find_joint("left_foot");
    r.right_foot = s.find_joint("right_foot");
    for (int i = 0; i < s.joint_count; ++i) {
        if (i != r.pelvis && i != r.neck && i != r.head && i != r.left_hand &&
            i != r.right_hand && i != r.left_foot && i != r.right_foot) {
            r.other.push_back(i);
        }
    }
    return r;
}

}  // namespace

std::vector<MotionSample> synth_walker(std::uint64_t seed, int n_sequences,
                                       const SynthConfig& config, const Skeleton& skeleton) {
    skeleton.validate();
    if (skeleton.joint_count < 5) throw ValidationError("synth_walker: skeleton needs >= 5 joints");
    if (skeleton.head_joint() < 0) throw ValidationError("synth_walker: skeleton needs a 'head' joint");
    if (n_sequences < 1) throw ValidationError("synth_walker: n_sequences must be >= 1");
    if (config.duration_s <= 0 || config.speed_mps <= 0) {
        throw ValidationError("synth_walker: duration and speed must be positive");
    }

    const JointRoles roles = assign_roles(skeleton);
    const int t_frames = static_cast<int>(std::lround(config.duration_s * skeleton.fps));
    const double dt = 1.0 / skeleton.fps;

    std::vector<MotionSample> sequences;
    sequences.reserve(n_sequences);
    for (int si = 0; si < n_sequences; ++si) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(si)));

        // Waypoint chain covering the whole duration.
        const double half = config.area_m / 2.0;
        double wx = (rng.uniform() * 2.0 - 1.0) * half * 0.5;
        double wy = (rng.uniform() * 2.0 - 1.0) * half * 0.5;
        double heading = rng.uniform() * 2.0 * kPi;
        std::vector<std::pair<double, double>> waypoints{{wx, wy}};
        double path_len = 0.0;
        const double needed = config.speed_mps * config.duration_s + config.area_m;
        while (path_len < needed) {
            const double leg = config.min_leg_m + rng.uniform() * (config.max_leg_m - config.min_leg_m);
            double turn = (kPi / 3.0 + rng.uniform() * kPi / 3.0);  // 60..120 degrees
            if (rng.uniform() < 0.5) turn = -turn;
            double nheading = heading + turn;
            double nx = waypoints.back().first + leg * std::cos(nheading);
            double ny = waypoints.back().second + leg * std::sin(nheading);
            // Steer back toward the center when the walk would leave the area.
            if (std::abs(nx) > half || std::abs(ny) > half) {
                nheading = std::atan2(-waypoints.back().second, -waypoints.back().first);
                nx = waypoints.back().first + leg * std::cos(nheading);
                ny = waypoints.back().second + leg * std::sin(nheading);
            }
            waypoints.emplace_back(nx, ny);
            heading = nheading;
            path_len += leg;
        }

        MotionSample sample;
        sample.skeleton = skeleton;
        sample.subject_id = "synth";
        sample.sequence_id = "walk" + std::to_string(si);
        sample.poses.resize(static_cast<std::size_t>(t_frames) * skeleton.joint_count * 3);
        sample.gaze.resize(static_cast<std::size_t>(t_frames) * 3);

        std::size_t segment = 0;
        double px = waypoints[0].first, py = waypoints[0].second;
        double phase = rng.uniform() * 2.0 * kPi;
        const double stride_hz = 1.6;  // steps per second

        for (int t = 0; t < t_frames; ++t) {
            // Advance along the current segment at constant speed.
            double remaining = config.speed_mps * dt;
            while (remaining > 0.0 && segment + 1 < waypoints.size()) {
                const double tx = waypoints[segment + 1].first - px;
                const double ty = waypoints[segment + 1].second - py;
                const double dist = std::hypot(tx, ty);
                if (dist <= remaining) {
                    px = waypoints[segment + 1].first;
                    py = waypoints[segment + 1].second;
                    remaining -= dist;
                    ++segment;
                } else {
                    px += tx / dist * remaining;
                    py += ty / dist * remaining;
                    remaining = 0.0;
                }
            }
            phase += 2.0 * kPi * stride_hz * dt;

            const std::size_t cur = std::min(segment + 1, waypoints.size() - 1);
            double hx = waypoints[cur].first - px;
            double hy = waypoints[cur].second - py;
            const double to_target = std::hypot(hx, hy);
            if (to_target > 1e-9) {
                hx /= to_target;
                hy /= to_target;
            } else {
                hx = std::cos(heading);
                hy = std::sin(heading);
            }

            // Gaze switches to the next waypoint when the turn is imminent.
            std::size_t gaze_target = cur;
            if (to_target <= config.speed_mps * config.gaze_lookahead_s && cur + 1 < waypoints.size()) {
                gaze_target = cur + 1;
            }

            const double sway = 0.02 * std::sin(2.0 * phase);
            const double lx = -hy, ly = hx;  // lateral unit vector

            auto put = [&](int joint, double x, double y, double z) {
                if (joint < 0) return;
                const std::size_t base = (static_cast<std::size_t>(t) * skeleton.joint_count + joint) * 3;
                sample.poses[base + 0] = static_cast<float>(x);
                sample.poses[base + 1] = static_cast<float>(y);
                sample.poses[base + 2] = static_cast<float>(z);
            };

            const double swing = std::sin(phase);
            put(roles.pelvis, px + lx * sway, py + ly * sway, 0.90 + 0.015 * std::sin(2.0 * phase));
            put(roles.neck, px + lx * sway, py + ly * sway, 1.40 + 0.015 * std::sin(2.0 * phase));
            const double head_x = px + lx * sway + hx * 0.03;
            const double head_y = py + ly * sway + hy * 0.03;
            const double head_z = 1.62 + 0.015 * std::sin(2.0 * phase);
            put(roles.head, head_x, head_y, head_z);
            put(roles.left_foot, px + lx * 0.12 + hx * 0.25 * swing, py + ly * 0.12 + hy * 0.25 * swing,
                0.05 * std::max(0.0, swing));
            put(roles.right_foot, px - lx * 0.12 - hx * 0.25 * swing, py - ly * 0.12 - hy * 0.25 * swing,
                0.05 * std::max(0.0, -swing));
            put(roles.left_hand, px + lx * 0.22 - hx * 0.18 * swing, py + ly * 0.22 - hy * 0.18 * swing,
                0.95);
            put(roles.right_hand, px - lx * 0.22 + hx * 0.18 * swing, py - ly * 0.22 + hy * 0.18 * swing,
                0.95);
            // Any extra joints sit evenly spaced along the spine.
            for (std::size_t oi = 0; oi < roles.other.size(); ++oi) {
                const double f = static_cast<double>(oi + 1) / (roles.other.size() + 1);
                put(roles.other[oi], px + lx * sway, py + ly * sway, 0.90 + f * 0.5);
            }

            // Gaze points at the target waypoint, taken at a fixed 1.2 m height.
            double gx = waypoints[gaze_target].first - head_x;
            double gy = waypoints[gaze_target].second - head_y;
            double gz = 1.2 - head_z;
            if (config.gaze_noise_deg > 0.0) {
                const double jitter = config.gaze_noise_deg * kPi / 180.0;
                const double ang = std::atan2(gy, gx) + rng.normal() * jitter;
                const double len = std::hypot(gx, gy);
                gx = len * std::cos(ang);
                gy = len * std::sin(ang);
            }
            const double gnorm = std::sqrt(gx * gx + gy * gy + gz * gz);
            sample.gaze[static_cast<std::size_t>(t) * 3 + 0] = static_cast<float>(gx / gnorm);
            sample.gaze[static_cast<std::size_t>(t) * 3 + 1] = static_cast<float>(gy / gnorm);
            sample.gaze[static_cast<std::size_t>(t) * 3 + 2] = static_cast<float>(gz / gnorm);
        }
        sample.validate();
        sequences.push_back(std::move(sample));
    }
    return sequences;
}

std::vector<float> head_direction_channel(const MotionSample& sample) {
    const int head = sample.skeleton.head_joint();
    const int neck = sample.skeleton.neck_joint();
    if (head < 0 || neck < 0) {
        throw ValidationError("head_direction: skeleton must designate 'head' and 'neck' joints");
    }
    const int t_frames = sample.num_frames();
    std::vector<float> out(static_cast<std::size_t>(t_frames) * 3);
    for (int t = 0; t < t_frames; ++t) {
        const double dx = sample.pose_at(t, head, 0) - sample.pose_at(t, neck, 0);
        const double dy = sample.pose_at(t, head, 1) - sample.pose_at(t, neck, 1);
        const double dz = sample.pose_at(t, head, 2) - sample.pose_at(t, neck, 2);
        const double norm = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (norm < 1e-12) {
            throw ValidationError("head_direction: zero-length neck->head vector at frame " +
                                  std::to_string(t));
        }
        out[static_cast<std::size_t>(t) * 3 + 0] = static_cast<float>(dx / norm);
        out[static_cast<std::size_t>(t) * 3 + 1] = static_cast<float>(dy / norm);
        out[static_cast<std::size_t>(t) * 3 + 2] = static_cast<float>(dz / norm);
    }
    return out;
}

}  // namespace gmd
