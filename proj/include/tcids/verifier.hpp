#pragma once

/**
 * @file verifier.hpp
 * @brief Receiver side of the protocol: a mirrored encoder plus anomaly
 *        latching.
 *
 * The receiver shares the public encoder parameters, mirrors the sender's
 * state machine from (s0, t0), and checks every received pulse against
 * the pulse it expects next. Payload messages rekey the mirror exactly as
 * they rekey the sender. The first mismatch latches permanently; inputs
 * keep being accepted afterwards so that full traces can be collected.
 *
 * A missing pulse is only declarable once time has passed its expected
 * tick (pulses on the side channel cannot be delayed, so silence past the
 * deadline is evidence). Time advances through the ticks of delivered
 * inputs plus an explicit flush at the end of the observation window.
 */

#include <optional>

#include "tcids/encoder.hpp"

namespace tcids {

enum class MismatchKind { MissingPulse, UnexpectedPulse };

struct Anomaly {
    Tick tick = 0;  ///< missing: the expected tick; unexpected: the received tick
    MismatchKind kind = MismatchKind::MissingPulse;

    friend bool operator==(const Anomaly&, const Anomaly&) = default;
};

struct Verdict {
    bool detected = false;
    std::optional<Tick> detection_tick;
    std::optional<MismatchKind> kind;
};

class Verifier {
public:
    explicit Verifier(EncoderConfig cfg) : mirror_(std::move(cfg)) {}

    /// Payload message delivery. If a pulse was expected strictly before
    /// ev.t and never arrived, latches MissingPulse at that expected tick;
    /// otherwise the mirror rekeys. Out-of-order delivery throws (before
    /// any anomaly is latched; afterwards inputs are ignored).
    void on_message(const Event& ev);

    /// Side-channel pulse delivery at `tick`. A pulse earlier than
    /// expected latches UnexpectedPulse; later than expected latches
    /// MissingPulse at the skipped expected tick.
    void on_pulse(Tick tick);

    /// Declares a pulse still expected strictly before `now` missing.
    void flush(Tick now);

    bool consistent() const { return !anomaly_.has_value(); }

    Verdict verdict() const {
        Verdict v;
        if (anomaly_) {
            v.detected = true;
            v.detection_tick = anomaly_->tick;
            v.kind = anomaly_->kind;
        }
        return v;
    }

    /// Mirrored sender state (frozen once an anomaly latches).
    const TimeEncoder& mirror() const { return mirror_; }

private:
    TimeEncoder mirror_;
    std::optional<Anomaly> anomaly_;
};

}  // namespace tcids
