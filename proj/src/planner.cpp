#include "luxplace/planner.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include <cmath>

#include "luxplace/rng.hpp"

namespace luxplace {

double entropy_reward(const BeliefField& belief, const Cell& cell) {
    const double sigma = belief.stddev(cell);
    if (!(sigma > 0.0)) throw PlanError("entropy_reward: nonpositive sigma");
    return 0.5 * std::log(2.0 * M_PI * M_E * sigma * sigma);
}

namespace {

struct SearchContext {
    const GridMap& grid;
    const BeliefField& belief;
    double c = 0.0;
    double discount = 0.95;
    int max_depth = 10;
    std::mt19937_64 rng;
};

double masked_reward(const SearchContext& ctx, const Cell& cell,
                     const std::vector<bool>& visited) {
    return visited[ctx.grid.index(cell)] ? 0.0 : entropy_reward(ctx.belief, cell);
}

// Random walk to the depth horizon, accumulating discounted masked rewards.
double rollout(SearchContext& ctx, Cell cell, int depth, std::vector<bool>& visited) {
    double ret = 0.0;
    double gamma = 1.0;
    while (depth < ctx.max_depth) {
        const auto actions = ctx.grid.legal_actions(cell);
        if (actions.empty()) break;
        const Action a = actions[uniform_index(ctx.rng, actions.size())];
        cell = apply_action(cell, a);
        ret += gamma * masked_reward(ctx, cell, visited);
        visited[ctx.grid.index(cell)] = true;
        gamma *= ctx.discount;
        ++depth;
    }
    return ret;
}

// One UCT iteration: selection, expansion of the first untried action,
// random rollout, backup of suffix returns along the path.
void simulate(SearchContext& ctx, PlanNode& root) {
    std::vector<bool> visited(static_cast<std::size_t>(ctx.grid.cell_count()), false);
    visited[ctx.grid.index(root.cell)] = true;

    std::vector<PlanNode*> path{&root};
    std::vector<double> rewards;  // reward observed entering each path node
    PlanNode* node = &root;
    bool expanded = false;

    while (node->depth < ctx.max_depth && !expanded) {
        const auto actions = ctx.grid.legal_actions(node->cell);
        if (actions.empty()) break;

        PlanNode* next = nullptr;
        for (Action a : actions) {  // fixed order; first untried wins
            if (!node->children[static_cast<int>(a)]) {
                auto child = std::make_unique<PlanNode>();
                child->cell = apply_action(node->cell, a);
                child->depth = node->depth + 1;
                next = child.get();
                node->children[static_cast<int>(a)] = std::move(child);
                expanded = true;
                break;
            }
        }
        if (!expanded) {
            double best = -std::numeric_limits<double>::infinity();
            for (Action a : actions) {
                const PlanNode& ch = *node->children[static_cast<int>(a)];
                const double uct = ch.mean_value() +
                                   ctx.c * std::sqrt(std::log(static_cast<double>(node->visits)) /
                                                     ch.visits);
                if (uct > best) {
                    best = uct;
                    next = node->children[static_cast<int>(a)].get();
                }
            }
        }
        rewards.push_back(masked_reward(ctx, next->cell, visited));
        visited[ctx.grid.index(next->cell)] = true;
        path.push_back(next);
        node = next;
    }

    double ret = rollout(ctx, node->cell, node->depth, visited);
    // backup: each node records the discounted return from entering it
    for (std::size_t i = path.size(); i-- > 1;) {
        ret = rewards[i - 1] + ctx.discount * ret;
        path[i]->visits += 1;
        path[i]->value_sum += ret;
        path[i]->returns.push_back(ret);
    }
    root.visits += 1;
}

// Greedy child by visit count; value then action order break ties.
std::pair<int, int> best_two_children(const PlanNode& node) {
    int best = -1, second = -1;
    auto better = [&node](int a, int b) {
        const PlanNode& na = *node.children[a];
        const PlanNode& nb = *node.children[b];
        if (na.visits != nb.visits) return na.visits > nb.visits;
        if (na.mean_value() != nb.mean_value()) return na.mean_value() > nb.mean_value();
        return a < b;
    };
    for (int a = 0; a < 4; ++a) {
        if (!node.children[a]) continue;
        if (best < 0 || better(a, best)) {
            second = best;
            best = a;
        } else if (second < 0 || better(a, second)) {
            second = a;
        }
    }
    return {best, second};
}

}  // namespace

double welch_p_value(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n1 = static_cast<double>(a.size());
    const auto n2 = static_cast<double>(b.size());
    if (a.size() < 2 || b.size() < 2) return 1.0;
    auto mean_var = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        s2 /= (v.size() - 1);
        return std::make_pair(m, s2);
    };
    const auto [m1, s1] = mean_var(a);
    const auto [m2, s2] = mean_var(b);
    const double se2 = s1 / n1 + s2 / n2;
    if (se2 <= 0.0) return m1 == m2 ? 1.0 : 0.0;
    const double t = (m1 - m2) / std::sqrt(se2);
    const double dof = se2 * se2 /
                       (s1 * s1 / (n1 * n1 * (n1 - 1.0)) + s2 * s2 / (n2 * n2 * (n2 - 1.0)));
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

PlanResult plan(const GridMap& grid, const BeliefField& belief, const Cell& start,
                const PlannerParams& params, std::uint64_t seed) {
    if (!grid.is_free(start)) throw PlanError("plan: start cell is not free");
    if (grid.legal_actions(start).empty())
        throw PlanError("plan: no legal action from start cell");

    double c;
    if (params.exploration_c.has_value()) {
        c = *params.exploration_c;
    } else {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Cell& cell : grid.free_cells()) {
            const double r = entropy_reward(belief, cell);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        c = std::max(0.5 * (hi - lo), 1e-3);
    }

    SearchContext ctx{grid, belief, c, params.discount, params.max_depth,
                      std::mt19937_64(mix_seed(seed, 0x71a9))};

    PlanResult result;
    result.root = std::make_unique<PlanNode>();
    result.root->cell = start;
    result.exploration_c = c;
    for (int i = 0; i < params.num_rollouts; ++i) simulate(ctx, *result.root);
    result.iterations = params.num_rollouts;

    const PlanNode* node = result.root.get();
    while (true) {
        const auto [best, second] = best_two_children(*node);
        (void)second;
        if (best < 0) break;
        result.actions.push_back(static_cast<Action>(best));
        node = node->children[best].get();
    }
    if (result.actions.empty()) throw PlanError("plan: produced no actions");

    if (params.collect_trace) {
        nlohmann::json j;
        j["exploration_c"] = c;
        j["iterations"] = result.iterations;
        nlohmann::json nodes = nlohmann::json::array();
        std::vector<const PlanNode*> stack{result.root.get()};
        while (!stack.empty()) {
            const PlanNode* n = stack.back();
            stack.pop_back();
            nodes.push_back({{"row", n->cell.row},
                             {"col", n->cell.col},
                             {"depth", n->depth},
                             {"visits", n->visits},
                             {"mean_value", n->mean_value()}});
            for (const auto& ch : n->children)
                if (ch) stack.push_back(ch.get());
        }
        j["nodes"] = std::move(nodes);
        result.trace_json = j.dump();
    }
    return result;
}

int actions_to_execute(const PlanResult& result, const PlannerParams& params) {
    int k = 0;
    const PlanNode* node = result.root.get();
    for (std::size_t depth = 0; depth < result.actions.size(); ++depth) {
        const auto [best, second] = best_two_children(*node);
        if (best < 0) break;
        if (second < 0) {  // no competitor: keep the step and continue
            ++k;
            node = node->children[best].get();
            continue;
        }
        const double p =
            welch_p_value(node->children[best]->returns, node->children[second]->returns);
        if (p < params.t_test_alpha) {
            ++k;
            node = node->children[best].get();
        } else {
            break;
        }
    }
    return std::max(k, 1);
}

}  // namespace luxplace
