#include "luxplace/trigger.hpp"

#include <sstream>

namespace luxplace {

const char* trigger_kind_name(TriggerKind kind) {
    switch (kind) {
        case TriggerKind::FirstStep: return "first_step";
        case TriggerKind::LastStep: return "last_step";
        case TriggerKind::EveryN: return "every_n";
        case TriggerKind::Logprob: return "logprob";
    }
    return "?";
}

std::string TriggerSpec::label() const {
    std::ostringstream out;
    switch (kind) {
        case TriggerKind::FirstStep: out << "first_step"; break;
        case TriggerKind::LastStep: out << "last_step"; break;
        case TriggerKind::EveryN: out << "every_" << every_n; break;
        case TriggerKind::Logprob: out << "logprob_" << alpha; break;
    }
    return out.str();
}

double ReconfigTrigger::current_threshold() const {
    if (spec_.kind != TriggerKind::Logprob) return std::nan("");
    if (!std::isfinite(running_max_)) return -std::numeric_limits<double>::infinity();
    if (spec_.strict || running_max_ < 0.0) return spec_.alpha * running_max_;
    // Scaling a nonnegative maximum would raise the threshold above the
    // maximum itself; fall back to the same-sized margin below it.
    return running_max_ - (spec_.alpha - 1.0) * std::abs(running_max_);
}

bool ReconfigTrigger::should_reconfigure(int t, double log_lik) {
    if (!std::isfinite(log_lik)) throw std::invalid_argument("trigger: non-finite log-likelihood");

    bool fire = false;
    switch (spec_.kind) {
        case TriggerKind::FirstStep: fire = (t == 0); break;
        case TriggerKind::LastStep: fire = (t == max_steps_); break;
        case TriggerKind::EveryN: fire = (t - t_c_) >= spec_.every_n; break;
        case TriggerKind::Logprob: fire = log_lik < current_threshold(); break;
    }

    if (fire) {
        t_c_ = t;
        running_max_ = -std::numeric_limits<double>::infinity();
    } else {
        running_max_ = std::max(running_max_, log_lik);
    }
    return fire;
}

}  // namespace luxplace
