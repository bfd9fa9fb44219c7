#include "tcids/verifier.hpp"

namespace tcids {

void Verifier::on_message(const Event& ev) {
    if (anomaly_) return;
    if (mirror_.next_pulse() < ev.t) {
        anomaly_ = Anomaly{mirror_.next_pulse(), MismatchKind::MissingPulse};
        return;
    }
    // A pulse pending exactly at ev.t is not owed: the sender discards it
    // when a message lands on that tick.
    mirror_.on_message(ev);
}

void Verifier::on_pulse(Tick tick) {
    if (anomaly_) return;
    const Tick expected = mirror_.next_pulse();
    if (tick == expected) {
        mirror_.on_tick(tick);
    } else if (tick < expected) {
        anomaly_ = Anomaly{tick, MismatchKind::UnexpectedPulse};
    } else {
        anomaly_ = Anomaly{expected, MismatchKind::MissingPulse};
    }
}

void Verifier::flush(Tick now) {
    if (anomaly_) return;
    if (mirror_.next_pulse() < now) {
        anomaly_ = Anomaly{mirror_.next_pulse(), MismatchKind::MissingPulse};
    }
}

}  // namespace tcids
