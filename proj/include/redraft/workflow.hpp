#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "redraft/backend.hpp"
#include "redraft/config.hpp"
#include "redraft/judge.hpp"
#include "redraft/prompts.hpp"
#include "redraft/state.hpp"
#include "redraft/trajectory.hpp"

namespace redraft {

struct WorkflowNode;

/// Leaf: one agent call. `name` defaults to the agent id and labels the node path.
struct Unit {
    std::string agent_id;
    std::string template_id;
    std::string name;
};

struct Sequential {
    std::string name;
    std::vector<WorkflowNode> children;
};

/// Runs `body` until the predicate holds or `max_iterations` bodies have run.
/// `iteration_offset` numbers iterations of a resumed loop after the ones already committed.
struct Loop {
    std::string name;
    std::shared_ptr<const WorkflowNode> body;
    int max_iterations = 0;
    std::string predicate_id;
    int iteration_offset = 0;
};

/// Children run on independent copies of the state; the merge operation joins them.
struct Parallel {
    std::string name;
    std::vector<WorkflowNode> children;
    std::string merge_id;
};

struct WorkflowNode {
    std::variant<Unit, Sequential, Loop, Parallel> node;
};

WorkflowNode unit(std::string agent_id, std::string template_id = {}, std::string name = {});
WorkflowNode sequential(std::string name, std::vector<WorkflowNode> children);
WorkflowNode loop(std::string name, WorkflowNode body, int max_iterations, std::string predicate_id,
                  int iteration_offset = 0);
WorkflowNode parallel(std::string name, std::vector<WorkflowNode> children, std::string merge_id);

class RunContext;

struct LeafInvocation {
    std::string path;
    std::string agent_id;
    std::string template_id;
};

using Agent = std::function<ResearchState(const ResearchState&, RunContext&, const LeafInvocation&)>;
using Predicate = std::function<bool(const ResearchState&, RunContext&)>;
using Merge = std::function<ResearchState(const ResearchState& input, const std::vector<ResearchState>& branches,
                                          RunContext&)>;

/// Named agents, exit predicates and merge operations. Starts with the merge "first"
/// and the predicates "never" and "always".
class Registry {
public:
    Registry();

    void add_agent(std::string id, Agent agent);
    void add_predicate(std::string id, Predicate predicate);
    void add_merge(std::string id, Merge merge);

    bool has_agent(const std::string& id) const { return agents_.count(id) > 0; }
    bool has_predicate(const std::string& id) const { return predicates_.count(id) > 0; }
    bool has_merge(const std::string& id) const { return merges_.count(id) > 0; }

    /// Throw ConfigError for unknown ids.
    const Agent& agent(const std::string& id) const;
    const Predicate& predicate(const std::string& id) const;
    const Merge& merge(const std::string& id) const;

private:
    std::map<std::string, Agent> agents_;
    std::map<std::string, Predicate> predicates_;
    std::map<std::string, Merge> merges_;
};

/// Throws ConfigError for negative loop bounds, empty Parallel nodes, a Loop without a body,
/// or ids missing from the registry.
void validate_workflow(const WorkflowNode& node, const Registry& registry);

/// Everything a leaf needs: providers, prompts, trajectory, clock and run settings.
/// Provider calls made through the context are retried and recorded.
class RunContext {
public:
    RunContext(TextGenerator& generator, SearchProvider& search, const PromptLibrary& prompts, Trajectory& trajectory,
               Clock& clock, RunConfig config);

    TextGenerator* judge_generator = nullptr; // defaults to the main generator
    RetryPolicy retry;
    Sleeper sleeper;
    /// Upper end of the fitness scale the judge reports on.
    double fitness_max = 10.0;
    /// Stop after the loop commit that leaves `step` at this value.
    std::optional<int> halt_after_step;
    /// Run Parallel children on threads. Records are buffered per branch and appended in child order.
    bool concurrent_parallel = false;
    std::function<void(const ResearchState&)> on_commit;
    std::function<void(const Report&)> on_draft;

    const RunConfig& config() const { return config_; }
    RunConfig& mutable_config() { return config_; }
    const PromptLibrary& prompts() const { return *prompts_; }
    Trajectory& trajectory() { return *trajectory_; }
    Clock& clock() { return *clock_; }
    SearchProvider& search_provider() { return *search_; }

    /// True when per-stage self-evolution applies: evolution mode, or denoising with it enabled.
    bool evolution_active() const;

    /// Base seed of a stage at a loop step; independent of where the stage sits in the tree.
    std::uint64_t seed_for(std::string_view stage, int step) const;

    void record(nlohmann::json record);

    std::string generate(GenerationRequest request, std::string_view stage);
    std::string judge(const std::string& template_id, const std::map<std::string, std::string>& values,
                      std::string_view stage);
    judge::JudgeFn judge_fn(std::string stage);
    std::vector<SearchResult> search(const std::string& query, int k, std::string_view stage);

    /// Copy of this context that records into `trajectory`.
    RunContext with_trajectory(Trajectory& trajectory) const;

private:
    std::string call_generator(TextGenerator& gen, GenerationRequest request, std::string_view stage);

    TextGenerator* generator_;
    SearchProvider* search_;
    const PromptLibrary* prompts_;
    Trajectory* trajectory_;
    Clock* clock_;
    RunConfig config_;
};

/// Executes the tree. Sequential threads state through children; Loop records the predicate
/// outcome and a commit (state snapshot) after every body; Parallel merges branch states.
/// Leaf errors are recorded and rethrown with the node path attached.
ResearchState run_workflow(const WorkflowNode& node, const ResearchState& state, RunContext& ctx,
                           const Registry& registry, const std::string& parent_path = {});

} // namespace redraft
