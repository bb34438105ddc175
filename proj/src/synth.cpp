#include "engage/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "engage/rng.hpp"

namespace engage {

namespace {

constexpr double kFrameRate = 30.0;
constexpr double kDsSigma = 1.2;       // lognormal shape; fat tail so long DS dominate DS time
constexpr double kMinRunS = 0.5;
constexpr double kMaxRunS = 180.0;

struct StateParams {
    double es_mean = 0.0;
    double ds_mean = 0.0;
    double es_sd = 1.0;  // disengaged sd is 1.6x this
};

StateParams continuous_params(const std::string& name) {
    if (name == "face_confidence") return {0.85, 0.45, 0.08};
    if (name == "gaze_direction") return {0.05, 0.55, 0.15};
    if (name == "gaze_distance") return {0.55, 0.75, 0.18};
    if (name == "head_pitch") return {0.00, 0.15, 0.20};
    if (name == "head_yaw") return {0.00, 0.20, 0.25};
    if (name == "head_distance") return {0.62, 1.00, 0.10};
    if (name == "au_brow_raiser") return {0.30, 0.42, 0.25};
    if (name == "au_lip_corner_puller") return {0.35, 0.25, 0.25};
    if (name == "au_jaw_drop") return {0.25, 0.33, 0.25};
    if (name == "au_blink") return {0.20, 0.26, 0.25};
    if (name == "harmonicity") return {8.0, 7.0, 3.0};
    if (name == "intensity") return {55.0, 58.0, 9.0};
    if (name == "mfcc_1") return {12.0, 13.0, 6.0};
    if (name == "mfcc_2") return {-4.0, -3.4, 5.0};
    if (name == "pitch") return {220.0, 212.0, 40.0};
    return {0.0, 0.4, 1.0};
}

double modality_scale(const SynthConfig& cfg, Modality m) {
    switch (m) {
        case Modality::Visual: return cfg.visual_noise_scale;
        case Modality::Audio: return cfg.audio_noise_scale;
        case Modality::Game: return cfg.game_noise_scale;
        case Modality::Meta: return 1.0;
    }
    return 1.0;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void SynthConfig::validate() const {
    if (participants < 1) throw std::runtime_error("synth: participants must be >= 1");
    if (sessions_per_participant < 1) throw std::runtime_error("synth: sessions must be >= 1");
    if (session_length_s <= 0.0) throw std::runtime_error("synth: session length must be > 0");
    if (!(engagement_rate > 0.0 && engagement_rate < 1.0)) {
        throw std::runtime_error("synth: engagement rate must lie in (0,1)");
    }
    if (ds_duration_median_s <= 0.0 || es_duration_median_s <= 0.0) {
        throw std::runtime_error("synth: durations must be > 0");
    }
    if (speech_coupling <= 0.0) throw std::runtime_error("synth: speech coupling must be > 0");
    if (frame_drop_rate < 0.0 || frame_drop_rate >= 1.0) {
        throw std::runtime_error("synth: frame drop rate must lie in [0,1)");
    }
}

FrameTable generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    const FeatureSchema schema = FeatureSchema::default_schema();
    const std::size_t n_cols = schema.size();
    const Rng root(cfg.seed);

    const double mean_ds = cfg.ds_duration_median_s * std::exp(kDsSigma * kDsSigma / 2.0);
    // ES shape follows from the rate and the requested median when consistent.
    const double base_mean_es =
        mean_ds * cfg.engagement_rate / (1.0 - cfg.engagement_rate);
    const double ratio = base_mean_es / cfg.es_duration_median_s;
    const double es_sigma = ratio > 1.02 ? std::sqrt(2.0 * std::log(ratio)) : 0.2;
    const double trend_total = cfg.trend_slope * cfg.sessions_per_participant;

    std::vector<FrameRecord> rows;
    const std::size_t frames_per_session =
        static_cast<std::size_t>(cfg.session_length_s * kFrameRate);
    rows.reserve(static_cast<std::size_t>(cfg.participants) * cfg.sessions_per_participant *
                 frames_per_session);

    for (int p = 0; p < cfg.participants; ++p) {
        Rng prng = root.child("synth_participant", static_cast<std::uint64_t>(p));
        std::vector<double> participant_offset(n_cols);
        for (std::size_t c = 0; c < n_cols; ++c) {
            participant_offset[c] =
                prng.normal(0.0, 0.8) * continuous_params(schema.at(c).name).es_sd;
        }

        for (int s = 0; s < cfg.sessions_per_participant; ++s) {
            const std::uint64_t session_tag =
                static_cast<std::uint64_t>(p) * 1000 + static_cast<std::uint64_t>(s);
            Rng state_rng = root.child("synth_state", session_tag);
            Rng feat_rng = root.child("synth_feat", session_tag);
            Rng event_rng = root.child("synth_event", session_tag);

            std::vector<double> session_offset(n_cols);
            for (std::size_t c = 0; c < n_cols; ++c) {
                session_offset[c] =
                    feat_rng.normal(0.0, 0.45) * continuous_params(schema.at(c).name).es_sd;
            }

            const auto rate_at = [&](double t) {
                const double q =
                    (s + t / cfg.session_length_s) / cfg.sessions_per_participant;
                return std::clamp(cfg.engagement_rate + trend_total * (q - 0.5), 0.02, 0.98);
            };

            // Engagement state per frame from alternating ES/DS runs.
            std::vector<char> engaged(frames_per_session, 0);
            {
                double t = 0.0;
                bool es = state_rng.bernoulli(rate_at(0.0));
                while (t < cfg.session_length_s) {
                    double dur = 0.0;
                    if (es) {
                        const double mean_es = mean_ds * rate_at(t) / (1.0 - rate_at(t));
                        const double mu = std::log(mean_es) - es_sigma * es_sigma / 2.0;
                        dur = state_rng.lognormal(mu, es_sigma);
                    } else {
                        dur = state_rng.lognormal(std::log(cfg.ds_duration_median_s), kDsSigma);
                    }
                    dur = std::clamp(dur, kMinRunS, kMaxRunS);
                    const auto i0 = static_cast<std::size_t>(t * kFrameRate);
                    const auto i1 = std::min(frames_per_session,
                                             static_cast<std::size_t>((t + dur) * kFrameRate));
                    for (std::size_t i = i0; i < i1; ++i) engaged[i] = es ? 1 : 0;
                    t += dur;
                    es = !es;
                }
            }

            // Event-driven game and environment machinery.
            const double speech_gap_es = 25.0;
            double last_speech = 0.0;
            double game_start = 0.0;
            double next_game_change = 30.0 + event_rng.exponential(120.0);
            int games_played = 1;
            int game_type = static_cast<int>(event_rng.below(4));
            int challenge_level = 2;
            double next_challenge_update = event_rng.exponential(45.0);
            int incorrect_game = 0;
            int incorrect_session = 0;
            double next_answer = event_rng.exponential(12.0);
            int people = 1;
            double next_people_update = event_rng.exponential(8.0);
            int dip_frames_left = 0;

            for (std::size_t i = 0; i < frames_per_session; ++i) {
                const double t = static_cast<double>(i) / kFrameRate;
                const bool es = engaged[i] != 0;
                const double dt = 1.0 / kFrameRate;

                const double gap = es ? speech_gap_es : speech_gap_es * cfg.speech_coupling;
                if (event_rng.bernoulli(dt / gap)) last_speech = t;
                if (t >= next_game_change) {
                    ++games_played;
                    game_type = static_cast<int>(event_rng.below(4));
                    incorrect_game = 0;
                    game_start = t;
                    next_game_change = t + 30.0 + event_rng.exponential(120.0);
                }
                if (t >= next_challenge_update) {
                    challenge_level = std::clamp(
                        challenge_level + (event_rng.bernoulli(0.5) ? 1 : -1), 1, 5);
                    next_challenge_update = t + event_rng.exponential(45.0);
                }
                if (t >= next_answer) {
                    if (event_rng.bernoulli(es ? 0.15 : 0.5)) {
                        ++incorrect_game;
                        ++incorrect_session;
                    }
                    next_answer = t + event_rng.exponential(12.0);
                }
                if (t >= next_people_update) {
                    people = 1 + ((!es && event_rng.bernoulli(0.55)) ? 1 : 0) +
                             (event_rng.bernoulli(0.04) ? 1 : 0);
                    next_people_update = t + event_rng.exponential(8.0);
                }
                if (dip_frames_left == 0 && es && event_rng.bernoulli(0.04)) {
                    dip_frames_left = 3;  // brief face-detection dropouts
                }

                const bool dropped = cfg.frame_drop_rate > 0.0 &&
                                     event_rng.bernoulli(cfg.frame_drop_rate) && i > 0 &&
                                     i + 1 < frames_per_session;
                if (dropped) {
                    if (dip_frames_left > 0) --dip_frames_left;
                    continue;
                }

                FrameRecord r;
                r.participant_id = "p" + std::to_string(p + 1);
                r.session_id = (s + 1 < 10 ? "s0" : "s") + std::to_string(s + 1);
                r.timestamp_s = t;
                r.engaged = es ? 1 : 0;
                r.features.resize(n_cols);
                for (std::size_t c = 0; c < n_cols; ++c) {
                    const Column& col = schema.at(c);
                    const std::string& name = col.name;
                    double v = 0.0;
                    if (name == "session_time_s") {
                        v = t;
                    } else if (name == "game_time_s") {
                        v = t - game_start;
                    } else if (name == kRobotElapsedColumn) {
                        v = t - last_speech;
                    } else if (name == "people_count") {
                        v = people;
                    } else if (name == "challenge_level") {
                        v = challenge_level;
                    } else if (name == "games_played") {
                        v = games_played;
                    } else if (name == "game_type") {
                        v = game_type;
                    } else if (name == "incorrect_count_game") {
                        v = incorrect_game;
                    } else if (name == "incorrect_count_session") {
                        v = incorrect_session;
                    } else if (name == "face_confidence") {
                        const StateParams sp = continuous_params(name);
                        const double mean = es ? sp.es_mean : sp.ds_mean;
                        const double sd = (es ? sp.es_sd : 1.6 * sp.es_sd) *
                                          modality_scale(cfg, col.modality);
                        v = clamp01(mean + participant_offset[c] * 0.25 +
                                    session_offset[c] * 0.25 + feat_rng.normal(0.0, sd));
                        if (dip_frames_left > 0) v = clamp01(0.30 + feat_rng.normal(0.0, 0.05));
                    } else if (name == "face_success") {
                        v = r.features[*schema.index_of("face_confidence")] >= 0.5 ? 1.0 : 0.0;
                    } else {
                        const StateParams sp = continuous_params(name);
                        const double mean = es ? sp.es_mean : sp.ds_mean;
                        const double sd = (es ? sp.es_sd : 1.6 * sp.es_sd) *
                                          modality_scale(cfg, col.modality);
                        v = mean + participant_offset[c] + session_offset[c] +
                            feat_rng.normal(0.0, sd);
                    }
                    r.features[c] = v;
                }
                if (dip_frames_left > 0) --dip_frames_left;
                rows.push_back(std::move(r));
            }
        }
    }
    return FrameTable(schema, std::move(rows));
}

}  // namespace engage
