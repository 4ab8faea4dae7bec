//! The planning tree: action sequences with per-edge sample statistics,
//! opening mechanics and discounted estimates.
//!
//! Nodes are identified by the sequence of actions leading to them; the
//! successor state of each node is computed once at creation and cached,
//! which is sound because dynamics are deterministic. A non-root node exists
//! only if its parent exists, carries the statistics of the edge entering
//! it, and is opened at most once. Opening a node draws `m` reward samples
//! for each of its K children and charges `m` budget units (plus the node's
//! depth under the reset condition).

use crate::budget::{BudgetExhausted, BudgetLedger};
use crate::env::GenerativeModel;
use crate::math::powi;
use crate::rng::SplitMix64;
use crate::seq::{Action, ActionSeq};
use crate::trace::{SampleLog, SampleRecord};
use alloc::vec::Vec;
use core::fmt;

/// Index into the tree arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Sample statistics of the edge entering a node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EdgeStats {
    pub count: u64,
    pub reward_sum: f64,
}

impl EdgeStats {
    /// Empirical mean; defined once the edge has a sample.
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.reward_sum / self.count as f64)
    }

    fn add(&mut self, reward: f64) {
        self.count += 1;
        self.reward_sum += reward;
    }
}

#[derive(Debug, Clone)]
struct Node<S> {
    parent: Option<NodeId>,
    action: Action,
    depth: u32,
    state: S,
    stats: EdgeStats,
    opened: bool,
    opened_with: u64,
    children: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpenError {
    NodeNotPresent,
    AlreadyOpened,
    Budget(BudgetExhausted),
}

impl fmt::Display for OpenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenError::NodeNotPresent => write!(f, "node is not present in the tree"),
            OpenError::AlreadyOpened => write!(f, "node was already opened"),
            OpenError::Budget(b) => write!(f, "{b}"),
        }
    }
}

impl core::error::Error for OpenError {}

impl From<BudgetExhausted> for OpenError {
    fn from(e: BudgetExhausted) -> Self {
        OpenError::Budget(e)
    }
}

/// Missing samples on some prefix edge of a requested sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingSamples;

impl fmt::Display for MissingSamples {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a prefix edge has no samples")
    }
}

impl core::error::Error for MissingSamples {}

#[derive(Debug, Clone)]
pub struct PlanningTree<S> {
    k: usize,
    gamma: f64,
    nodes: Vec<Node<S>>,
    by_depth: Vec<Vec<NodeId>>,
    max_opened_depth: u32,
}

impl<S: Clone> PlanningTree<S> {
    pub fn new(k: usize, gamma: f64, root_state: S) -> Self {
        assert!(k >= 1 && k <= Action::MAX as usize + 1);
        assert!((0.0..1.0).contains(&gamma));
        let root = Node {
            parent: None,
            action: 0,
            depth: 0,
            state: root_state,
            stats: EdgeStats::default(),
            opened: false,
            opened_with: 0,
            children: Vec::new(),
        };
        Self {
            k,
            gamma,
            nodes: alloc::vec![root],
            by_depth: alloc::vec![alloc::vec![NodeId(0)]],
            max_opened_depth: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn depth_of(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].depth
    }

    pub fn stats(&self, id: NodeId) -> &EdgeStats {
        &self.nodes[id.index()].stats
    }

    pub fn state(&self, id: NodeId) -> &S {
        &self.nodes[id.index()].state
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn action_into(&self, id: NodeId) -> Action {
        self.nodes[id.index()].action
    }

    pub fn is_opened(&self, id: NodeId) -> bool {
        self.nodes[id.index()].opened
    }

    pub fn opened_with(&self, id: NodeId) -> u64 {
        self.nodes[id.index()].opened_with
    }

    /// Deepest opened node so far.
    pub fn max_opened_depth(&self) -> u32 {
        self.max_opened_depth
    }

    /// Deepest node present in the tree.
    pub fn max_depth(&self) -> u32 {
        self.by_depth.len() as u32 - 1
    }

    pub fn nodes_at_depth(&self, depth: u32) -> &[NodeId] {
        self.by_depth
            .get(depth as usize)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn child(&self, id: NodeId, action: Action) -> Option<NodeId> {
        self.nodes[id.index()]
            .children
            .iter()
            .copied()
            .find(|&c| self.nodes[c.index()].action == action)
    }

    pub fn lookup(&self, seq: &ActionSeq) -> Option<NodeId> {
        let mut id = self.root();
        for &a in seq.actions() {
            id = self.child(id, a)?;
        }
        Some(id)
    }

    /// Action sequence leading to a node.
    pub fn seq_of(&self, id: NodeId) -> ActionSeq {
        let mut rev = Vec::new();
        let mut cur = id;
        while let Some(p) = self.nodes[cur.index()].parent {
            rev.push(self.nodes[cur.index()].action);
            cur = p;
        }
        rev.reverse();
        ActionSeq::from_actions(rev)
    }

    fn add_child(&mut self, parent: NodeId, action: Action, state: S) -> NodeId {
        let depth = self.nodes[parent.index()].depth + 1;
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            parent: Some(parent),
            action,
            depth,
            state,
            stats: EdgeStats::default(),
            opened: false,
            opened_with: 0,
            children: Vec::new(),
        });
        self.nodes[parent.index()].children.push(id);
        if self.by_depth.len() <= depth as usize {
            self.by_depth.push(Vec::new());
        }
        self.by_depth[depth as usize].push(id);
        id
    }

    /// Open a node: draw `evals` reward samples for each of its K children,
    /// caching each child's successor state. Charges the ledger before any
    /// sampling, so a failed charge leaves the tree untouched.
    pub fn open<M: GenerativeModel<State = S>>(
        &mut self,
        id: NodeId,
        evals: u64,
        env: &M,
        ledger: &mut BudgetLedger,
        rng: &mut SplitMix64,
        mut log: Option<&mut SampleLog>,
    ) -> Result<(), OpenError> {
        debug_assert!(evals >= 1);
        if id.index() >= self.nodes.len() {
            return Err(OpenError::NodeNotPresent);
        }
        if self.nodes[id.index()].opened {
            return Err(OpenError::AlreadyOpened);
        }
        let depth = self.nodes[id.index()].depth;
        ledger.try_charge(ledger.opening_cost(evals, depth))?;

        let seq = log.is_some().then(|| self.seq_of(id));
        for a in 0..self.k as Action {
            let state = self.nodes[id.index()].state.clone();
            let child_state = env.step(&state, a);
            let child = match self.child(id, a) {
                Some(c) => c,
                None => self.add_child(id, a, child_state),
            };
            for _ in 0..evals {
                let stream_index = rng.draws();
                let reward = env.sample_reward(&state, a, rng);
                self.nodes[child.index()].stats.add(reward);
                if let Some(log) = log.as_deref_mut() {
                    log.push(SampleRecord {
                        state_seq: seq.clone().unwrap(),
                        action: a,
                        reward,
                        stream_index,
                    });
                }
            }
        }
        self.nodes[id.index()].opened = true;
        self.nodes[id.index()].opened_with = evals;
        self.max_opened_depth = self.max_opened_depth.max(depth);
        Ok(())
    }

    /// Open by sequence; the sequence must already be a tree node.
    pub fn open_seq<M: GenerativeModel<State = S>>(
        &mut self,
        seq: &ActionSeq,
        evals: u64,
        env: &M,
        ledger: &mut BudgetLedger,
        rng: &mut SplitMix64,
        log: Option<&mut SampleLog>,
    ) -> Result<(), OpenError> {
        let id = self.lookup(seq).ok_or(OpenError::NodeNotPresent)?;
        self.open(id, evals, env, ledger, rng, log)
    }

    /// Draw `evals` extra samples of the edge entering `id` (one state-action
    /// pair, not an opening). Used by candidate cross-validation.
    pub fn evaluate_edge<M: GenerativeModel<State = S>>(
        &mut self,
        id: NodeId,
        evals: u64,
        env: &M,
        ledger: &mut BudgetLedger,
        rng: &mut SplitMix64,
        mut log: Option<&mut SampleLog>,
    ) -> Result<(), OpenError> {
        let parent = self.nodes[id.index()].parent.ok_or(OpenError::NodeNotPresent)?;
        ledger.try_charge(evals)?;
        let action = self.nodes[id.index()].action;
        let state = self.nodes[parent.index()].state.clone();
        let seq = log.is_some().then(|| self.seq_of(parent));
        for _ in 0..evals {
            let stream_index = rng.draws();
            let reward = env.sample_reward(&state, action, rng);
            self.nodes[id.index()].stats.add(reward);
            if let Some(log) = log.as_deref_mut() {
                log.push(SampleRecord {
                    state_seq: seq.clone().unwrap(),
                    action,
                    reward,
                    stream_index,
                });
            }
        }
        Ok(())
    }

    /// Get or create a child node without sampling. Episodic planners build
    /// paths this way and account for their evaluations themselves.
    pub fn ensure_child<M: GenerativeModel<State = S>>(
        &mut self,
        parent: NodeId,
        action: Action,
        env: &M,
    ) -> NodeId {
        if let Some(c) = self.child(parent, action) {
            return c;
        }
        let state = env.step(&self.nodes[parent.index()].state, action);
        self.add_child(parent, action, state)
    }

    /// Record one externally drawn reward sample on the edge entering `id`.
    pub fn add_sample(&mut self, id: NodeId, reward: f64) {
        debug_assert!(id != self.root());
        self.nodes[id.index()].stats.add(reward);
    }

    /// Discounted empirical estimate along the path to `id`:
    /// the sum of `gamma^t * mean(edge at depth t+1)`.
    ///
    /// Panics if a prefix edge has no samples; planners only query sampled
    /// nodes. Use [`PlanningTree::u_hat_seq`] for the checked variant.
    pub fn u_hat(&self, id: NodeId) -> f64 {
        self.try_u_hat(id).expect("u_hat on a path with unsampled edges")
    }

    fn try_u_hat(&self, id: NodeId) -> Result<f64, MissingSamples> {
        let mut means = Vec::with_capacity(self.nodes[id.index()].depth as usize);
        let mut cur = id;
        while let Some(p) = self.nodes[cur.index()].parent {
            means.push(self.nodes[cur.index()].stats.mean().ok_or(MissingSamples)?);
            cur = p;
        }
        let mut acc = 0.0;
        for mean in means {
            // means were pushed deepest-first
            acc = mean + self.gamma * acc;
        }
        Ok(acc)
    }

    /// Checked discounted estimate for an arbitrary sequence.
    pub fn u_hat_seq(&self, seq: &ActionSeq) -> Result<f64, MissingSamples> {
        let id = self.lookup(seq).ok_or(MissingSamples)?;
        self.try_u_hat(id)
    }

    /// Up to `count` unopened depth-`depth` nodes whose edge statistics pass
    /// `eligible`, ranked by descending estimate with lexicographic
    /// tie-break. Returns fewer when fewer qualify.
    pub fn select_top_nodes(
        &self,
        depth: u32,
        count: usize,
        eligible: impl Fn(&EdgeStats) -> bool,
    ) -> Vec<NodeId> {
        if count == 0 {
            return Vec::new();
        }
        let mut ranked: Vec<(NodeId, f64, ActionSeq)> = self
            .nodes_at_depth(depth)
            .iter()
            .copied()
            .filter(|&id| !self.is_opened(id) && self.stats(id).count > 0 && eligible(self.stats(id)))
            .map(|id| (id, self.u_hat(id), self.seq_of(id)))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.2.cmp(&b.2)));
        ranked.truncate(count);
        ranked.into_iter().map(|(id, _, _)| id).collect()
    }

    /// Highest-estimate sampled node of depth >= 1 (lexicographic tie-break).
    pub fn argmax_u_hat(&self) -> Option<(NodeId, f64)> {
        self.argmax_u_hat_where(|_, _| true)
    }

    /// Same, restricted to nodes accepted by `keep(id, depth)`.
    pub fn argmax_u_hat_where(&self, keep: impl Fn(NodeId, u32) -> bool) -> Option<(NodeId, f64)> {
        let mut best: Option<(NodeId, f64, ActionSeq)> = None;
        for depth in 1..=self.max_depth() {
            for &id in self.nodes_at_depth(depth) {
                if self.stats(id).count == 0 || !keep(id, depth) {
                    continue;
                }
                let u = self.u_hat(id);
                let better = match &best {
                    None => true,
                    Some((_, bu, bseq)) => {
                        u > *bu || (u == *bu && self.seq_of(id) < *bseq)
                    }
                };
                if better {
                    best = Some((id, u, self.seq_of(id)));
                }
            }
        }
        best.map(|(id, u, _)| (id, u))
    }

    /// Depth-first walk over sampled non-root nodes. `visit` receives the
    /// node, its depth and the edge sample counts along its path
    /// (`counts[t]` is the count of the edge entering depth `t+1`).
    pub fn walk_sampled(&self, mut visit: impl FnMut(NodeId, u32, &[u64])) {
        enum Step {
            Enter(NodeId),
            Leave,
        }
        let mut counts: Vec<u64> = Vec::new();
        let mut stack = alloc::vec![Step::Enter(self.root())];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(id) => {
                    let node = &self.nodes[id.index()];
                    if id != self.root() {
                        counts.push(node.stats.count);
                        visit(id, node.depth, &counts);
                        stack.push(Step::Leave);
                    }
                    for &child in node.children.iter().rev() {
                        if self.nodes[child.index()].stats.count > 0 {
                            stack.push(Step::Enter(child));
                        }
                    }
                }
                Step::Leave => {
                    counts.pop();
                }
            }
        }
    }

    /// Discounted true value of a prefix, `sum gamma^t * r(x_t, a_t)`,
    /// regardless of what was sampled. Needs oracle access.
    pub fn u_value_of_path<M>(&self, env: &M, id: NodeId) -> f64
    where
        M: crate::env::OracleAccess<State = S>,
    {
        let seq = self.seq_of(id);
        let mut state = env.root_state();
        let mut acc = 0.0;
        for (t, &a) in seq.actions().iter().enumerate() {
            acc += powi(self.gamma, t as u32) * env.true_mean(&state, a);
            state = env.step(&state, a);
        }
        acc
    }
}

/// Optimistic bound `u + gamma^depth * reward_bound / (1 - gamma)`.
pub fn b_value(u: f64, depth: u32, reward_bound: f64, gamma: f64) -> f64 {
    assert!((0.0..1.0).contains(&gamma));
    assert!(reward_bound.is_finite());
    u + powi(gamma, depth) * reward_bound / (1.0 - gamma)
}
