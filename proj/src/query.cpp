#include "epn/query.hpp"

#include <algorithm>
#include <deque>

namespace epn {

namespace {

void validate(const QueryContext& ctx) {
    if (!ctx.snapshot) throw std::invalid_argument("query context lacks a snapshot");
    if (ctx.k < 1) throw std::invalid_argument("k must be at least 1");
    const EventType eop = ctx.eop();
    if (!ctx.snapshot->registry().contains(eop))
        throw std::invalid_argument("EOP is not a registered event type");
}

/// Runs one CI test through the oracle, failing open (edge kept) on errors.
bool edge_independent(const QueryContext& ctx, EventType parent, EventType child,
                      std::span<const EventType> cond) {
    if (ctx.counters) ++ctx.counters->ci_tests;
    try {
        return ctx.ci->test(parent, child, cond).independent;
    } catch (const std::exception&) {
        if (ctx.counters) ++ctx.counters->ci_errors;
        return false;
    }
}

/// CI-tests `node` against each currently surviving parent, conditioning on
/// the node's other surviving parents; independent edges go to the overlay.
/// `parents` arrives in descending edge-probability order, which is also the
/// priority order used when an oracle truncates the condition set.
void prune_parents(const QueryContext& ctx, EventType node,
                   std::vector<EventType>& parents, EdgeOverlay& overlay) {
    if (!ctx.ci || parents.empty()) return;
    const std::vector<EventType> initial = parents;
    std::vector<EventType> cond;
    cond.reserve(initial.size());
    for (EventType p : initial) {
        if (overlay.removed(p, node)) continue;
        cond.clear();
        for (EventType q : parents)
            if (q != p && !overlay.removed(q, node)) cond.push_back(q);
        if (edge_independent(ctx, p, node, cond)) {
            overlay.remove(p, node);
            if (ctx.counters) ++ctx.counters->edges_pruned;
        }
    }
    std::erase_if(parents,
                  [&](EventType p) { return overlay.removed(p, node); });
}

}  // namespace

CausalSearchOrder causal_search_order(const EpnSnapshot& snapshot, EventType eop) {
    if (!snapshot.registry().contains(eop))
        throw std::invalid_argument("EOP is not a registered event type");
    CausalSearchOrder out;
    std::vector<char> seen(snapshot.type_count() + 1, 0);
    std::deque<EventType> queue;
    queue.push_back(eop);
    seen[eop] = 1;
    while (!queue.empty()) {
        const EventType node = queue.front();
        queue.pop_front();
        out.order.push_back(node);
        for (const ChildEdge& e : snapshot.children(node)) {
            if (seen[e.child]) continue;
            seen[e.child] = 1;
            queue.push_back(e.child);
        }
    }
    return out;
}

void marginal_prune(const QueryContext& ctx, const CausalSearchOrder& order,
                    EdgeOverlay& overlay) {
    if (!ctx.ci) return;
    for (EventType node : order.order) {
        for (const ChildEdge& e : ctx.snapshot->children(node)) {
            if (overlay.removed(node, e.child)) continue;
            if (edge_independent(ctx, node, e.child, {})) {
                overlay.remove(node, e.child);
                if (ctx.counters) ++ctx.counters->edges_pruned;
            }
        }
    }
}

double score_node(const EpnSnapshot& snapshot, EventType node,
                  const EdgeOverlay& overlay, const std::vector<double>& finalized,
                  const std::vector<char>& has_score) {
    double s = 0.0;
    for (const ParentEdge& pe : snapshot.parents(node)) {
        if (overlay.removed(pe.parent, node)) continue;
        if (!has_score[pe.parent]) continue;
        s += pe.prob * finalized[pe.parent];
    }
    return s;
}

RankedPrediction es_topk(const QueryContext& ctx) {
    validate(ctx);
    const EpnSnapshot& g = *ctx.snapshot;
    const EventType eop = ctx.eop();

    const CausalSearchOrder order = causal_search_order(g, eop);
    EdgeOverlay overlay(g.type_count());
    marginal_prune(ctx, order, overlay);

    std::vector<double> finalized(g.type_count() + 1, 0.0);
    std::vector<char> has_score(g.type_count() + 1, 0);
    finalized[eop] = 1.0;
    has_score[eop] = 1;

    std::vector<std::pair<EventType, double>> buffer;
    buffer.reserve(order.order.size());
    std::vector<EventType> parents;
    for (std::size_t i = 1; i < order.order.size(); ++i) {
        const EventType node = order.order[i];
        parents.clear();
        for (const ParentEdge& pe : g.parents(node))
            if (!overlay.removed(pe.parent, node)) parents.push_back(pe.parent);
        prune_parents(ctx, node, parents, overlay);
        const double s = score_node(g, node, overlay, finalized, has_score);
        finalized[node] = s;
        has_score[node] = 1;
        buffer.emplace_back(node, s);
    }

    std::sort(buffer.begin(), buffer.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (buffer.size() > ctx.k) buffer.resize(ctx.k);

    RankedPrediction out;
    out.entries = std::move(buffer);
    out.explored_count = order.order.size();
    return out;
}

RankedPrediction rset_topk(const QueryContext& ctx) {
    validate(ctx);
    const EpnSnapshot& g = *ctx.snapshot;
    const EventType eop = ctx.eop();
    const std::uint32_t n = g.type_count();

    EdgeOverlay overlay(n);
    std::vector<double> score(n + 1, 0.0);
    std::vector<char> considered(n + 1, 0);  // membership in B_C
    std::vector<char> visited(n + 1, 0);
    score[eop] = 1.0;
    considered[eop] = 1;
    std::size_t considered_count = 1;

    // B_k: sorted by score desc, ties by type id asc; never holds the EOP.
    std::vector<std::pair<EventType, double>> topk;
    auto topk_sort = [&topk]() {
        std::sort(topk.begin(), topk.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
    };

    std::vector<EventType> parents;
    for (;;) {
        // highest-score unvisited candidate among the EOP and B_k
        EventType pick = 0;
        double pick_score = -1.0;
        auto consider_candidate = [&](EventType t, double s) {
            if (visited[t]) return;
            if (s > pick_score || (s == pick_score && t < pick)) {
                pick = t;
                pick_score = s;
            }
        };
        consider_candidate(eop, score[eop]);
        for (const auto& [t, s] : topk) consider_candidate(t, s);
        if (pick == 0) break;

        visited[pick] = 1;
        for (const ChildEdge& edge : g.children(pick)) {
            const EventType child = edge.child;
            if (overlay.removed(pick, child)) continue;
            if (considered[child]) continue;  // score frozen at first consideration

            parents.clear();
            for (const ParentEdge& pe : g.parents(child))
                if (considered[pe.parent] && !overlay.removed(pe.parent, child))
                    parents.push_back(pe.parent);
            prune_parents(ctx, child, parents, overlay);

            double s = 0.0;
            for (EventType p : parents) s += g.cond_prob(p, child) * score[p];

            score[child] = s;
            considered[child] = 1;
            ++considered_count;

            if (topk.size() < ctx.k) {
                topk.emplace_back(child, s);
                topk_sort();
            } else if (!topk.empty() && s > topk.back().second) {
                topk.back() = {child, s};
                topk_sort();
            }
        }
    }

    RankedPrediction out;
    out.entries = std::move(topk);
    out.explored_count = considered_count;
    return out;
}

}  // namespace epn
