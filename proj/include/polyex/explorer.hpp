#pragma once

// Multi-robot exploration over a goal tree. The engine is generic over a
// world model that supplies sensing (new goals plus their pairwise region
// relations), path planning, and optional mid-path observation stops. The
// simulation is event-driven: it advances to the next cluster arrival, ties
// broken by (time, event type, lowest robot id).
//
// Tree navigation is logical: a cluster resolves through explored and
// under-exploration nodes without moving and only travels for real goals
// (short-cutting), so robots go straight from their position to the next
// goal they are assigned.

#include "polyex/rational.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyex {

enum class NodeState { Unexplored, UnderExploration, Explored };
enum class NodeKind { Root, ExtensionGoal, FrontierGoal };

enum class GoalRelation { Disjoint, FirstContainsSecond, SecondContainsFirst, Overlap };

inline const char* to_string(NodeState s) {
    switch (s) {
        case NodeState::Unexplored: return "unexplored";
        case NodeState::UnderExploration: return "under-exploration";
        case NodeState::Explored: return "explored";
    }
    return "?";
}

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Root: return "root";
        case NodeKind::ExtensionGoal: return "extension-goal";
        case NodeKind::FrontierGoal: return "frontier-goal";
    }
    return "?";
}

/// Competitive-ratio bound 2(sqrt(2)p + log2 p) / (1 + log2 p).
inline double competitive_bound(int p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    const double lg = std::log2(static_cast<double>(p));
    return 2.0 * (std::sqrt(2.0) * p + lg) / (1.0 + lg);
}

/// Traversal cost bound 2(C_TREE + d_max log2 p) / (1 + log2 p).
inline double tree_exploration_bound(double c_tree, double d_max, int p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    const double lg = std::log2(static_cast<double>(p));
    return 2.0 * (c_tree + d_max * lg) / (1.0 + lg);
}

/// Exact bound check. For p a power of two the comparison is rational and
/// has no floating error; otherwise it falls back to long doubles.
inline bool tree_bound_holds(const Rat& makespan, const Rat& c_tree, const Rat& d_max, int p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    int lg = -1;
    for (int k = 0, q = 1; q <= p; ++k, q <<= 1) {
        if (q == p) lg = k;
    }
    if (lg >= 0) {
        return makespan * (1 + lg) <= 2 * (c_tree + d_max * lg);
    }
    const long double lgl = std::log2(static_cast<long double>(p));
    const long double lhs = makespan.template convert_to<long double>() * (1.0L + lgl);
    const long double rhs =
        2.0L * (c_tree.template convert_to<long double>() +
                d_max.template convert_to<long double>() * lgl);
    return lhs <= rhs;
}

template <class World>
class ExplorationEngine {
  public:
    using Position = typename World::Position;
    using GoalKey = typename World::GoalKey;

    struct Node {
        int id = 0;
        Position pos{};
        GoalKey key{};
        NodeKind kind = NodeKind::ExtensionGoal;
        NodeState state = NodeState::Unexplored;
        int parent = -1;
        std::vector<int> children;  // clockwise order
        Rat edge_length = 0;        // geodesic to parent at creation time
        bool abandoned = false;
        std::optional<Rat> first_arrival;
    };

    struct Result {
        std::vector<Node> nodes;
        Rat c_tree = 0;
        Rat makespan = 0;
        Rat d_max = 0;
        std::vector<Rat> robot_distance;
        // Per robot: timestamped waypoints, starting at (0, start).
        std::vector<std::vector<std::pair<Rat, Position>>> trajectories;
        std::vector<int> arrival_sequence;  // node ids by first physical arrival
        int abandoned_goals = 0;
        bool completed = false;  // root marked explored
    };

    static Result explore(World& world, int p, const Position& start) {
        if (p < 1) throw std::invalid_argument("p must be >= 1");
        ExplorationEngine e(world, p, start);
        e.run();
        return std::move(e.result_);
    }

    /// Splits robots as equally as possible over k clockwise-ordered
    /// children; remainders go to the clockwise-earliest children. With
    /// fewer robots than children only the earliest children are served.
    static std::vector<std::vector<int>> divide_robots(const std::vector<int>& robots, int k) {
        const int r = static_cast<int>(robots.size());
        std::vector<std::vector<int>> shares;
        if (r >= k) {
            const int base = r / k, extra = r % k;
            int idx = 0;
            for (int i = 0; i < k; ++i) {
                const int take = base + (i < extra ? 1 : 0);
                shares.emplace_back(robots.begin() + idx, robots.begin() + idx + take);
                idx += take;
            }
        } else {
            for (int i = 0; i < r; ++i) shares.push_back({robots[i]});
        }
        return shares;
    }

  private:
    struct Cluster {
        std::vector<int> robots;  // sorted
        Position pos{};
        bool active = true;
    };

    struct Event {
        Rat time;
        int type;  // 0 = observation stop, 1 = arrival
        int robot_key;
        long seq;
        int cluster = -1;
        int node = -1;
        Position pos{};

        bool operator<(const Event& o) const {
            if (time != o.time) return time < o.time;
            if (type != o.type) return type < o.type;
            if (robot_key != o.robot_key) return robot_key < o.robot_key;
            return seq < o.seq;
        }
    };

    ExplorationEngine(World& world, int p, const Position& start)
        : world_(world), p_(p), start_(start) {}

    World& world_;
    int p_;
    Position start_;
    std::vector<Cluster> clusters_;
    std::set<Event> events_;
    long seq_ = 0;
    std::set<GoalKey> known_keys_;
    Result result_;
    std::vector<Rat> finish_time_;

    Node& node(int id) { return result_.nodes[id]; }

    void run() {
        result_.robot_distance.assign(p_, Rat(0));
        result_.trajectories.assign(p_, {});
        finish_time_.assign(p_, Rat(0));
        for (int r = 0; r < p_; ++r) result_.trajectories[r].push_back({Rat(0), start_});

        Node root;
        root.id = 0;
        root.pos = start_;
        root.kind = NodeKind::Root;
        result_.nodes.push_back(root);

        Cluster c0;
        for (int r = 0; r < p_; ++r) c0.robots.push_back(r);
        c0.pos = start_;
        clusters_.push_back(c0);
        push_event(Rat(0), 1, 0, 0);

        while (!events_.empty()) {
            Event ev = *events_.begin();
            events_.erase(events_.begin());
            if (ev.type == 0) {
                world_.observe(ev.pos, ev.time);
                continue;
            }
            // Merge clusters arriving at the same node at the same time.
            std::vector<int> merged{ev.cluster};
            for (auto it = events_.begin(); it != events_.end();) {
                if (it->time == ev.time && it->type == 1 && it->node == ev.node) {
                    merged.push_back(it->cluster);
                    it = events_.erase(it);
                } else if (it->time != ev.time) {
                    break;
                } else {
                    ++it;
                }
            }
            int cid = merged[0];
            if (merged.size() > 1) {
                for (size_t i = 1; i < merged.size(); ++i) {
                    auto& dst = clusters_[cid].robots;
                    auto& src = clusters_[merged[i]].robots;
                    dst.insert(dst.end(), src.begin(), src.end());
                    clusters_[merged[i]].active = false;
                }
                std::sort(clusters_[cid].robots.begin(), clusters_[cid].robots.end());
            }
            clusters_[cid].pos = node(ev.node).pos;
            if (!node(ev.node).first_arrival) {
                node(ev.node).first_arrival = ev.time;
                result_.arrival_sequence.push_back(ev.node);
            }
            resolve(cid, ev.node, ev.time);
        }

        finalize();
    }

    void push_event(const Rat& t, int type, int cluster, int nd) {
        Event ev;
        ev.time = t;
        ev.type = type;
        ev.robot_key = clusters_[cluster].robots.front();
        ev.seq = seq_++;
        ev.cluster = cluster;
        ev.node = nd;
        events_.insert(ev);
    }

    void push_scan_event(const Rat& t, const Position& pos, int robot_key) {
        Event ev;
        ev.time = t;
        ev.type = 0;
        ev.robot_key = robot_key;
        ev.seq = seq_++;
        ev.pos = pos;
        events_.insert(ev);
    }

    void resolve(int cid, int nid, const Rat& t) {
        int cur = nid;
        for (;;) {
            Node& n = node(cur);
            if (n.state == NodeState::Unexplored) {
                n.state = NodeState::UnderExploration;
                sense_and_grow(cur, t);
                if (!unfinished_children(cur).empty()) {
                    dispatch(cid, cur, t);
                    return;
                }
                n.state = NodeState::Explored;
                if (cur == 0) {
                    go_home(cid, t);
                    return;
                }
                cur = n.parent;
                continue;
            }
            const std::vector<int> kids = unfinished_children(cur);
            if (kids.empty()) {
                if (n.state != NodeState::Explored) n.state = NodeState::Explored;
                if (cur == 0) {
                    go_home(cid, t);
                    return;
                }
                cur = n.parent;
                continue;
            }
            dispatch(cid, cur, t);
            return;
        }
    }

    std::vector<int> unfinished_children(int nid) const {
        std::vector<int> out;
        for (int c : result_.nodes[nid].children) {
            if (result_.nodes[c].state != NodeState::Explored) out.push_back(c);
        }
        return out;
    }

    void sense_and_grow(int nid, const Rat& t) {
        auto sr = world_.sense(node(nid).pos, t);
        // Never re-add a goal already in the tree.
        std::vector<int> keep;
        for (size_t i = 0; i < sr.goals.size(); ++i) {
            if (!known_keys_.count(sr.goals[i].key)) keep.push_back(static_cast<int>(i));
        }
        if (keep.empty()) return;

        const int m = static_cast<int>(keep.size());
        // Rewire within the new batch: a goal whose region is contained in
        // another's becomes its child (smallest container wins); properly
        // overlapping regions chain clockwise-earlier above clockwise-later.
        std::vector<int> parent_goal(m, -1);
        for (int a = 0; a < m; ++a) {
            int best = -1;
            for (int b = 0; b < m; ++b) {
                if (a == b) continue;
                const int i = keep[std::min(a, b)], j = keep[std::max(a, b)];
                GoalRelation r = sr.rel[i][j];
                const bool b_contains_a =
                    (a < b) ? r == GoalRelation::SecondContainsFirst : r == GoalRelation::FirstContainsSecond;
                if (!b_contains_a) continue;
                if (best < 0 || sr.goals[keep[b]].measure < sr.goals[keep[best]].measure ||
                    (sr.goals[keep[b]].measure == sr.goals[keep[best]].measure && b < best)) {
                    best = b;
                }
            }
            if (best < 0) {
                for (int b = 0; b < a; ++b) {
                    const int i = keep[b], j = keep[a];
                    if (sr.rel[i][j] == GoalRelation::Overlap) {
                        best = b;
                        break;
                    }
                }
            }
            parent_goal[a] = best;
        }

        std::vector<int> ids(m, -1);
        for (int a = 0; a < m; ++a) {
            const auto& g = sr.goals[keep[a]];
            Node nn;
            nn.id = static_cast<int>(result_.nodes.size());
            nn.pos = g.pos;
            nn.key = g.key;
            nn.kind = g.kind;
            ids[a] = nn.id;
            known_keys_.insert(g.key);
            result_.nodes.push_back(nn);
        }
        for (int a = 0; a < m; ++a) {
            const int parent_id = parent_goal[a] >= 0 ? ids[parent_goal[a]] : nid;
            node(ids[a]).parent = parent_id;
            node(parent_id).children.push_back(ids[a]);
            auto path = world_.plan_path(node(parent_id).pos, node(ids[a]).pos);
            node(ids[a]).edge_length = path.reachable ? path.length : Rat(0);
        }
    }

    void dispatch(int cid, int nid, const Rat& t) {
        const std::vector<int> kids = unfinished_children(nid);
        const Position from = clusters_[cid].pos;
        const auto shares =
            divide_robots(clusters_[cid].robots, static_cast<int>(kids.size()));
        clusters_[cid].active = false;
        for (size_t i = 0; i < shares.size(); ++i) {
            Cluster sub;
            sub.robots = shares[i];
            sub.pos = from;
            clusters_.push_back(sub);
            const int sub_id = static_cast<int>(clusters_.size()) - 1;
            const int kid = kids[i];
            if (node(kid).state == NodeState::Unexplored) {
                travel(sub_id, kid, t);
            } else {
                resolve(sub_id, kid, t);
            }
        }
    }

    void travel(int cid, int nid, const Rat& t) {
        auto path = world_.plan_path(clusters_[cid].pos, node(nid).pos);
        if (!path.reachable) {
            node(nid).state = NodeState::Explored;
            node(nid).abandoned = true;
            ++result_.abandoned_goals;
            // Pick the next assignment from the goal's parent.
            resolve(cid, node(nid).parent >= 0 ? node(nid).parent : 0, t);
            return;
        }
        record_motion(cid, path, t);
        for (const auto& [dt, pos] : path.scan_stops) {
            push_scan_event(t + dt, pos, clusters_[cid].robots.front());
        }
        push_event(t + path.length, 1, cid, nid);
    }

    void go_home(int cid, const Rat& t) {
        auto path = world_.plan_path(clusters_[cid].pos, start_);
        if (!path.reachable) throw std::logic_error("cluster cannot return to start");
        record_motion(cid, path, t);
        for (int r : clusters_[cid].robots) finish_time_[r] = t + path.length;
        clusters_[cid].active = false;
        result_.completed = true;
    }

    void record_motion(int cid, const typename World::PathResult& path, const Rat& t) {
        if (path.length == 0) return;
        for (int r : clusters_[cid].robots) {
            result_.robot_distance[r] += path.length;
            Rat acc = t;
            for (size_t i = 1; i < path.waypoints.size(); ++i) {
                acc += world_.segment_length(path.waypoints[i - 1], path.waypoints[i]);
                result_.trajectories[r].push_back({acc, path.waypoints[i]});
            }
        }
    }

    void finalize() {
        for (const auto& n : result_.nodes) {
            if (n.id != 0) result_.c_tree += n.edge_length;
        }
        // Depth of every node along recorded tree edges; max over leaves.
        std::vector<Rat> depth(result_.nodes.size(), Rat(0));
        for (size_t i = 1; i < result_.nodes.size(); ++i) {
            depth[i] = depth[result_.nodes[i].parent] + result_.nodes[i].edge_length;
            result_.d_max = std::max(result_.d_max, depth[i]);
        }
        for (int r = 0; r < p_; ++r) {
            result_.makespan = std::max(result_.makespan, result_.robot_distance[r]);
        }
    }
};

// --- exports ---------------------------------------------------------------

template <class World>
std::string tree_to_dot(const typename ExplorationEngine<World>::Result& res,
                        const std::string& header_comment = "") {
    std::ostringstream out;
    if (!header_comment.empty()) out << "// " << header_comment << "\n";
    out << "digraph exploration {\n";
    for (const auto& n : res.nodes) {
        const auto [x, y] = World::to_xy(n.pos);
        out << "  n" << n.id << " [label=\"" << to_string(n.kind) << "\\n"
            << to_string(n.state) << "\\n(" << x << ", " << y << ")\"];\n";
    }
    for (const auto& n : res.nodes) {
        for (int c : n.children) out << "  n" << n.id << " -> n" << c << ";\n";
    }
    out << "}\n";
    return out.str();
}

template <class World>
std::string trajectories_to_csv(const typename ExplorationEngine<World>::Result& res,
                                const std::string& header_comment = "") {
    std::ostringstream out;
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "robot,t,x,y\n";
    for (size_t r = 0; r < res.trajectories.size(); ++r) {
        for (const auto& [t, p] : res.trajectories[r]) {
            const auto [x, y] = World::to_xy(p);
            out << r << "," << to_double(t) << "," << x << "," << y << "\n";
        }
    }
    return out.str();
}

}  // namespace polyex
