#include "redraft/workflow.hpp"

#include <exception>
#include <future>

#include "redraft/error.hpp"
#include "redraft/text.hpp"

namespace redraft {

using nlohmann::json;

WorkflowNode unit(std::string agent_id, std::string template_id, std::string name) {
    if (name.empty()) name = agent_id;
    return WorkflowNode{Unit{std::move(agent_id), std::move(template_id), std::move(name)}};
}

WorkflowNode sequential(std::string name, std::vector<WorkflowNode> children) {
    return WorkflowNode{Sequential{std::move(name), std::move(children)}};
}

WorkflowNode loop(std::string name, WorkflowNode body, int max_iterations, std::string predicate_id,
                  int iteration_offset) {
    return WorkflowNode{Loop{std::move(name), std::make_shared<const WorkflowNode>(std::move(body)), max_iterations,
                             std::move(predicate_id), iteration_offset}};
}

WorkflowNode parallel(std::string name, std::vector<WorkflowNode> children, std::string merge_id) {
    return WorkflowNode{Parallel{std::move(name), std::move(children), std::move(merge_id)}};
}

Registry::Registry() {
    add_merge("first", [](const ResearchState& input, const std::vector<ResearchState>& branches, RunContext&) {
        return branches.empty() ? input : branches.front();
    });
    add_predicate("never", [](const ResearchState&, RunContext&) { return false; });
    add_predicate("always", [](const ResearchState&, RunContext&) { return true; });
}

void Registry::add_agent(std::string id, Agent agent) {
    agents_[std::move(id)] = std::move(agent);
}

void Registry::add_predicate(std::string id, Predicate predicate) {
    predicates_[std::move(id)] = std::move(predicate);
}

void Registry::add_merge(std::string id, Merge merge) {
    merges_[std::move(id)] = std::move(merge);
}

const Agent& Registry::agent(const std::string& id) const {
    auto it = agents_.find(id);
    if (it == agents_.end()) throw ConfigError("unknown agent '" + id + "'");
    return it->second;
}

const Predicate& Registry::predicate(const std::string& id) const {
    auto it = predicates_.find(id);
    if (it == predicates_.end()) throw ConfigError("unknown exit predicate '" + id + "'");
    return it->second;
}

const Merge& Registry::merge(const std::string& id) const {
    auto it = merges_.find(id);
    if (it == merges_.end()) throw ConfigError("unknown merge operation '" + id + "'");
    return it->second;
}

void validate_workflow(const WorkflowNode& node, const Registry& registry) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Unit>) {
                registry.agent(n.agent_id);
            } else if constexpr (std::is_same_v<T, Sequential>) {
                for (const auto& c : n.children) validate_workflow(c, registry);
            } else if constexpr (std::is_same_v<T, Loop>) {
                if (n.max_iterations < 0) throw ConfigError("loop '" + n.name + "' has negative max_iterations");
                if (!n.body) throw ConfigError("loop '" + n.name + "' has no body");
                registry.predicate(n.predicate_id);
                validate_workflow(*n.body, registry);
            } else {
                if (n.children.empty()) throw ConfigError("parallel node '" + n.name + "' has no children");
                registry.merge(n.merge_id);
                for (const auto& c : n.children) validate_workflow(c, registry);
            }
        },
        node.node);
}

RunContext::RunContext(TextGenerator& generator, SearchProvider& search, const PromptLibrary& prompts,
                       Trajectory& trajectory, Clock& clock, RunConfig config)
    : sleeper(real_sleeper()),
      generator_(&generator),
      search_(&search),
      prompts_(&prompts),
      trajectory_(&trajectory),
      clock_(&clock),
      config_(std::move(config)) {}

bool RunContext::evolution_active() const {
    return config_.mode == Mode::evolution || (config_.mode == Mode::denoising && config_.denoise.self_evolution);
}

std::uint64_t RunContext::seed_for(std::string_view stage, int step) const {
    return text::fnv1a(std::to_string(config_.seed) + "/" + std::string(stage) + "/" + std::to_string(step));
}

void RunContext::record(json record) {
    record["t_ms"] = clock_->now_ms();
    trajectory_->append(std::move(record));
}

std::string RunContext::call_generator(TextGenerator& gen, GenerationRequest request, std::string_view stage) {
    validate(request);
    auto start = clock_->now_ms();
    auto text = with_retry(
        retry, sleeper, [&] { return gen.generate(request); },
        [&](int attempt, const BackendError& e) {
            record({{"kind", "error"},
                    {"stage", stage},
                    {"error_class", to_string(e.kind())},
                    {"message", e.what()},
                    {"attempt", attempt},
                    {"retryable", e.retryable()}});
        });
    if (text.empty()) {
        record({{"kind", "error"}, {"stage", stage}, {"error_class", "malformed_response"}, {"message", "empty output"}});
        throw MalformedResponseError("backend returned empty text for stage " + std::string(stage));
    }
    json rec{{"kind", "generate"},
             {"stage", stage},
             {"role", request.role ? json(to_string(*request.role)) : json(nullptr)},
             {"template_id", request.template_id},
             {"temperature", request.temperature},
             {"top_k", request.top_k ? json(*request.top_k) : json(nullptr)},
             {"seed", request.seed ? json(*request.seed) : json(nullptr)},
             {"prompt", request.prompt},
             {"response", text},
             {"duration_ms", clock_->now_ms() - start}};
    record(std::move(rec));
    return text;
}

std::string RunContext::generate(GenerationRequest request, std::string_view stage) {
    return call_generator(*generator_, std::move(request), stage);
}

std::string RunContext::judge(const std::string& template_id, const std::map<std::string, std::string>& values,
                              std::string_view stage) {
    GenerationRequest request;
    request.prompt = prompts_->render(template_id, values);
    request.role = Role::judge;
    request.template_id = template_id;
    return call_generator(judge_generator ? *judge_generator : *generator_, std::move(request), stage);
}

judge::JudgeFn RunContext::judge_fn(std::string stage) {
    return [this, stage = std::move(stage)](const std::string& template_id,
                                            const std::map<std::string, std::string>& values) {
        return judge(template_id, values, stage);
    };
}

std::vector<SearchResult> RunContext::search(const std::string& query, int k, std::string_view stage) {
    if (k < 0) throw PreconditionError("search k must be non-negative");
    auto start = clock_->now_ms();
    auto results = with_retry(
        retry, sleeper, [&] { return search_->search(query, k); },
        [&](int attempt, const BackendError& e) {
            record({{"kind", "error"},
                    {"stage", stage},
                    {"error_class", to_string(e.kind())},
                    {"message", e.what()},
                    {"attempt", attempt},
                    {"retryable", e.retryable()}});
        });
    if (static_cast<int>(results.size()) > k) results.resize(static_cast<std::size_t>(k));
    json docs = json::array();
    for (const auto& r : results) docs.push_back(to_json(r));
    record({{"kind", "search"},
            {"stage", stage},
            {"query", query},
            {"k", k},
            {"results", docs},
            {"duration_ms", clock_->now_ms() - start}});
    return results;
}

RunContext RunContext::with_trajectory(Trajectory& trajectory) const {
    RunContext copy = *this;
    copy.trajectory_ = &trajectory;
    return copy;
}

namespace {

std::string join_path(const std::string& parent, const std::string& name) {
    return parent.empty() ? name : parent + "/" + name;
}

ResearchState run_unit(const Unit& u, const ResearchState& state, RunContext& ctx, const Registry& registry,
                       const std::string& path) {
    const auto& agent = registry.agent(u.agent_id);
    auto start = ctx.clock().now_ms();
    try {
        auto out = agent(state, ctx, LeafInvocation{path, u.agent_id, u.template_id});
        ctx.record({{"kind", "leaf"},
                    {"node", path},
                    {"agent", u.agent_id},
                    {"template_id", u.template_id},
                    {"step", out.step},
                    {"duration_ms", ctx.clock().now_ms() - start}});
        return out;
    } catch (Error& e) {
        if (e.node_path().empty()) e.set_node_path(path);
        ctx.record({{"kind", "error"},
                    {"node", path},
                    {"error_class", to_string(e.kind())},
                    {"message", e.what()},
                    {"step", state.step}});
        throw;
    }
}

ResearchState run_loop(const Loop& l, ResearchState state, RunContext& ctx, const Registry& registry,
                       const std::string& path) {
    const auto& predicate = registry.predicate(l.predicate_id);
    for (int i = 0; i < l.max_iterations; ++i) {
        int iteration = l.iteration_offset + i + 1;
        state = run_workflow(*l.body, state, ctx, registry, path);
        bool exit = predicate(state, ctx);
        ctx.record({{"kind", "predicate"},
                    {"node", path},
                    {"predicate", l.predicate_id},
                    {"iteration", iteration},
                    {"value", exit}});
        ctx.record({{"kind", "commit"},
                    {"node", path},
                    {"iteration", iteration},
                    {"step", state.step},
                    {"exit", exit},
                    {"state", snapshot(state)}});
        if (ctx.on_commit) ctx.on_commit(state);
        if (ctx.halt_after_step && state.step == *ctx.halt_after_step) throw HaltRequested(state.step);
        if (exit) break;
    }
    return state;
}

ResearchState run_parallel(const Parallel& p, const ResearchState& state, RunContext& ctx, const Registry& registry,
                           const std::string& path) {
    const auto& merge = registry.merge(p.merge_id);
    std::vector<ResearchState> branches;
    if (!ctx.concurrent_parallel) {
        for (std::size_t i = 0; i < p.children.size(); ++i) {
            branches.push_back(
                run_workflow(p.children[i], state, ctx, registry, path + "[" + std::to_string(i) + "]"));
        }
    } else {
        std::vector<std::unique_ptr<Trajectory>> buffers;
        std::vector<std::future<ResearchState>> futures;
        for (std::size_t i = 0; i < p.children.size(); ++i) {
            buffers.push_back(std::make_unique<Trajectory>());
            futures.push_back(std::async(std::launch::async, [&, i, branch_ctx = ctx.with_trajectory(*buffers.back())]() mutable {
                return run_workflow(p.children[i], state, branch_ctx, registry,
                                    path + "[" + std::to_string(i) + "]");
            }));
        }
        std::exception_ptr failure;
        for (auto& f : futures) {
            try {
                branches.push_back(f.get());
            } catch (...) {
                if (!failure) failure = std::current_exception();
            }
        }
        for (const auto& buffer : buffers) {
            for (auto rec : buffer->records()) {
                rec.erase("seq");
                rec.erase("schema_version");
                ctx.trajectory().append(std::move(rec));
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    auto merged = merge(state, branches, ctx);
    ctx.record({{"kind", "parallel_merge"}, {"node", path}, {"merge", p.merge_id}, {"branches", branches.size()}});
    return merged;
}

} // namespace

ResearchState run_workflow(const WorkflowNode& node, const ResearchState& state, RunContext& ctx,
                           const Registry& registry, const std::string& parent_path) {
    return std::visit(
        [&](const auto& n) -> ResearchState {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Unit>) {
                return run_unit(n, state, ctx, registry, join_path(parent_path, n.name));
            } else if constexpr (std::is_same_v<T, Sequential>) {
                auto path = join_path(parent_path, n.name);
                ResearchState s = state;
                for (const auto& c : n.children) s = run_workflow(c, s, ctx, registry, path);
                return s;
            } else if constexpr (std::is_same_v<T, Loop>) {
                if (n.max_iterations < 0) throw ConfigError("loop '" + n.name + "' has negative max_iterations");
                if (!n.body) throw ConfigError("loop '" + n.name + "' has no body");
                return run_loop(n, state, ctx, registry, join_path(parent_path, n.name));
            } else {
                if (n.children.empty()) throw ConfigError("parallel node '" + n.name + "' has no children");
                return run_parallel(n, state, ctx, registry, join_path(parent_path, n.name));
            }
        },
        node.node);
}

} // namespace redraft
