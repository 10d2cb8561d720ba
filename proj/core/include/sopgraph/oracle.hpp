#pragma once

#include <memory>

#include "sopgraph/decider.hpp"
#include "sopgraph/environment.hpp"

namespace sop {

/// Deterministic decider that selects exactly the candidates whose
/// conditions evaluate true against the observations consumed so far.
/// Used by the benchmark to realize ground-truth-following runs; with it
/// the run trajectory equals the ground-truth trajectory by construction.
///
/// In distinguishable mode the first true candidate wins (benchmark SOP
/// conditions are mutually exclusive per node); a true tool-less
/// candidate is answered with no_call. In indistinguishable mode all
/// true candidates are selected through their dummy tools.
class OracleDecider : public Decider {
public:
    explicit OracleDecider(std::shared_ptr<const ObservationLog> log)
        : log_(std::move(log)) {}

    DeciderResponse decide(const DeciderRequest& request) override;

private:
    std::shared_ptr<const ObservationLog> log_;
};

std::unique_ptr<Decider> make_oracle_decider(std::shared_ptr<const ObservationLog> log);

}  // namespace sop
