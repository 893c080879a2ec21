// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gmd {

// Fixed joint layout at a fixed capture rate. Built-in skeletons are looked
// up by name; arbitrary skeletons can be described in a JSON file (see
// docs/FORMATS.md).
struct Skeleton {
    std::string name;
    int joint_count = 0;
    std::vector<std::string> joint_names;
    double fps = 30.0;

    void validate() const;
    // Index of a joint by name, -1 if absent.
    int find_joint(const std::string& joint_name) const;
    int head_joint() const { return find_joint("head"); }
    int neck_joint() const { return find_joint("neck"); }

    // Built-ins: "synth7", "mogaze21", "gimo23".
    static Skeleton named(const std::string& skeleton_name);
    // Bone list (pairs of joint indices) for rendering; empty if unknown.
    static std::vector<std::pair<int, int>> bones(const Skeleton& s);
};

// One synchronized recording: poses [T, j, 3] in meters and gaze [T, 3]
// unit direction vectors, both float32. Immutable by convention after
// construction.
struct MotionSample {
    Skeleton skeleton;
    std::vector<float> poses;  // [T, j, 3], frame-major, joint-minor, xyz
    std::vector<float> gaze;   // [T, 3]
    std::string subject_id;
    std::string sequence_id;

    int num_frames() const;
    float pose_at(int t, int joint, int axis) const {
        return poses[(static_cast<std::size_t>(t) * skeleton.joint_count + joint) * 3 + axis];
    }
    float gaze_at(int t, int axis) const { return gaze[static_cast<std::size_t>(t) * 3 + axis]; }

    // Frames [begin, begin+len) as a new sample.
    MotionSample slice(int begin, int len) const;
    void validate() const;
};

// One train/eval item: H observed frames plus the F ground-truth future
// frames. Future gaze is retained so training can build full-length
// sequences; evaluation only ever reads future_gt.
struct Window {
    MotionSample observed;           // length H
    std::vector<float> future_gt;    // [F, j, 3]
    std::vector<float> future_gaze;  // [F, 3]
    int history = 0;                 // H
    int future = 0;                  // F
};

// Split assignment and windowing parameters for a dataset directory.
struct DatasetManifest {
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;
    int history = 15;
    int future = 60;
    int stride_train = 1;
    int stride_eval = 15;

    void validate() const;  // train and test subjects must be disjoint
    std::string to_json() const;
    static DatasetManifest from_json(const std::string& text);
};

// GMDS container I/O (see docs/FORMATS.md for the byte layout).
void write_gmds(const MotionSample& sample, const std::string& path);
MotionSample read_gmds(const std::string& path);

// CSV adapter: each row is frame index, 3*j pose coordinates (meters),
// 3 gaze components. Gaze is renormalized to unit length.
MotionSample convert_csv(const std::string& csv_path, const Skeleton& skeleton);

// Sliding windows starting at 0, stride, 2*stride, ... Empty when H+F > T.
std::vector<Window> make_windows(const MotionSample& sample, int history, int future, int stride);

struct SynthConfig {
    double duration_s = 10.0;
    double speed_mps = 1.0;         // walking speed
    double area_m = 4.0;            // waypoints drawn from [-area/2, area/2]^2
    double gaze_lookahead_s = 0.5;  // gaze jumps to the next waypoint this early
    double gaze_noise_deg = 0.0;    // optional angular jitter on gaze
    double min_leg_m = 1.2;         // waypoint spacing
    double max_leg_m = 2.0;
};

// Deterministic waypoint walker with sinusoidal limb swing. Gaze tracks the
// current target waypoint and switches to the next one gaze_lookahead_s
// before each turn, so observed gaze carries information about future turns.
std::vector<MotionSample> synth_walker(std::uint64_t seed, int n_sequences,
                                       const SynthConfig& config, const Skeleton& skeleton);

// Per-frame unit vector from the neck joint toward the head joint: a proxy
// conditioning channel for skeletons/datasets without eye tracking.
std::vector<float> head_direction_channel(const MotionSample& sample);

}  // namespace gmd
