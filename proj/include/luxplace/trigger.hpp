#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace luxplace {

enum class TriggerKind { FirstStep, LastStep, EveryN, Logprob };

const char* trigger_kind_name(TriggerKind kind);

struct TriggerSpec {
    TriggerKind kind = TriggerKind::Logprob;
    int every_n = 10;      // EveryN period
    double alpha = 1.07;   // Logprob scaling constant, in [1, inf)
    bool strict = false;   // raw scaled-max threshold even for nonnegative maxima

    std::string label() const;
};

// Per-episode reconfiguration decision state machine. The initial emitter
// configuration counts as the reconfiguration at t = 0 for every kind.
class ReconfigTrigger {
  public:
    ReconfigTrigger(TriggerSpec spec, int max_steps) : spec_(spec), max_steps_(max_steps) {
        if (spec.kind == TriggerKind::Logprob && spec.alpha < 1.0)
            throw std::invalid_argument("trigger: alpha must be >= 1");
        if (spec.kind == TriggerKind::EveryN && spec.every_n < 1)
            throw std::invalid_argument("trigger: n must be >= 1");
    }

    // Decide at step t given the current log-likelihood of the desired
    // field. Firing resets the epoch; otherwise the running maximum absorbs
    // this step's value.
    bool should_reconfigure(int t, double log_lik);

    // Threshold the Logprob comparison would use right now (for logging).
    double current_threshold() const;

    int last_reconfigure_step() const { return t_c_; }
    double running_max() const { return running_max_; }
    const TriggerSpec& spec() const { return spec_; }

  private:
    TriggerSpec spec_;
    int max_steps_ = 100;
    int t_c_ = 0;
    double running_max_ = -std::numeric_limits<double>::infinity();
};

}  // namespace luxplace
