#pragma once

#include <memory>

#include "oc/features.hpp"
#include "oc/mdp.hpp"
#include "oc/rng.hpp"

namespace oc {

struct EnvStep {
    Observation obs;
    double reward = 0.0;
    bool done = false;
};

/// Episodic environment. Instances are single-owner per training run; all
/// randomness flows through the caller's RngStream.
class Env {
public:
    virtual ~Env() = default;
    virtual int n_actions() const = 0;
    virtual Observation reset(RngStream& rng) = 0;
    virtual EnvStep step(int action, RngStream& rng) = 0;
    /// Lifecycle hook invoked by train() before each episode's reset.
    virtual void on_episode_start(int /*episode*/, RngStream& /*rng*/) {}
};

/// Env adapter over a TabularMDP.
class TabularEnv : public Env {
public:
    explicit TabularEnv(TabularMDP mdp) : mdp_(std::move(mdp)) {}

    int n_actions() const override { return mdp_.n_actions; }
    int n_states() const { return mdp_.n_states; }
    const TabularMDP& mdp() const { return mdp_; }

    Observation reset(RngStream& rng) override {
        state_ = sample_start(mdp_, rng);
        return Observation{state_, {}};
    }

    EnvStep step(int action, RngStream& rng) override {
        const StepOutcome out = oc::step(mdp_, state_, action, rng);
        state_ = out.next_state;
        return EnvStep{Observation{state_, {}}, out.reward, out.done};
    }

private:
    TabularMDP mdp_;
    int state_ = 0;
};

}  // namespace oc
