//! Breadth-first search for tower-group quotients: expand the descendant
//! tree class by class, prune with the arithmetic filter pipeline, keep
//! per-class statistics as first-class output, and checkpoint long runs.

pub mod checkpoint;
pub mod report;

use std::fmt;

use arith_filters::{
    abelianization_filter, capitulation_filter, profile_filter, relator_bound_filter,
    ArithmeticFixture, FilterError, FilterVerdict, MatchMode,
};
use pc_core::PcPresentation;
use rayon::prelude::*;
use tree::{immediate_descendants, random_children, Limits, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterSpec {
    Ab,
    Rank,
    Profile2,
    Profile4,
    Critical,
    Capitulation,
}

impl FilterSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FilterSpec::Ab => "ab",
            FilterSpec::Rank => "rank",
            FilterSpec::Profile2 => "profile2",
            FilterSpec::Profile4 => "profile4",
            FilterSpec::Critical => "critical",
            FilterSpec::Capitulation => "capitulation",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<FilterSpec>, String> {
        s.split(',')
            .filter(|t| !t.is_empty())
            .map(|t| match t.trim() {
                "ab" => Ok(FilterSpec::Ab),
                "rank" => Ok(FilterSpec::Rank),
                "profile2" => Ok(FilterSpec::Profile2),
                "profile4" => Ok(FilterSpec::Profile4),
                "critical" => Ok(FilterSpec::Critical),
                "capitulation" => Ok(FilterSpec::Capitulation),
                other => Err(format!("unknown filter `{other}`")),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// Sample k children per node with the recorded seed.
    Sampled { per_node: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub max_class: u32,
    pub filters: Vec<FilterSpec>,
    pub mode: SearchMode,
    /// Cap on node expansions; exhausting it checkpoints and exits distinctly.
    pub budget: Option<u64>,
    pub profile_mode: MatchMode,
    pub rmax: u32,
    pub limits: Limits,
    pub checkpoint_path: Option<std::path::PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_class: 2,
            filters: Vec::new(),
            mode: SearchMode::Exhaustive,
            budget: None,
            profile_mode: MatchMode::Exact,
            rmax: 5,
            limits: Limits::default(),
            checkpoint_path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Open,
    Pruned,
    Terminal,
    Moribund,
    Survivor,
}

impl NodeStatus {
    pub fn tag(&self) -> &'static str {
        match self {
            NodeStatus::Open => "open",
            NodeStatus::Pruned => "pruned",
            NodeStatus::Terminal => "terminal",
            NodeStatus::Moribund => "moribund",
            NodeStatus::Survivor => "survivor",
        }
    }

    pub fn from_tag(s: &str) -> Option<NodeStatus> {
        Some(match s {
            "open" => NodeStatus::Open,
            "pruned" => NodeStatus::Pruned,
            "terminal" => NodeStatus::Terminal,
            "moribund" => NodeStatus::Moribund,
            "survivor" => NodeStatus::Survivor,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub group: PcPresentation,
    /// Allowable-subgroup certificates from the root; the class exceeds the
    /// root class by the path length.
    pub path: Vec<String>,
    pub class: u32,
    pub verdicts: Vec<FilterVerdict>,
    pub status: NodeStatus,
}

impl SearchNode {
    pub fn root(group: PcPresentation) -> SearchNode {
        let class = group.weight_class();
        SearchNode { group, path: Vec::new(), class, verdicts: Vec::new(), status: NodeStatus::Open }
    }

    /// Stable identity: the full certificate path.
    pub fn certificate(&self) -> String {
        if self.path.is_empty() {
            "root".to_string()
        } else {
            self.path.join("/")
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassStats {
    pub class: u32,
    pub enumerated: u64,
    pub pruned: Vec<(String, u64)>,
    pub survivors: u64,
    pub terminal: u64,
}

impl ClassStats {
    fn bump_prune(&mut self, filter: &str) {
        if let Some(e) = self.pruned.iter_mut().find(|(n, _)| n == filter) {
            e.1 += 1;
        } else {
            self.pruned.push((filter.to_string(), 1));
        }
    }

    pub fn pruned_total(&self) -> u64 {
        self.pruned.iter().map(|(_, c)| c).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub stats: Vec<ClassStats>,
    /// Open or survivor nodes remaining at the end (the final frontier).
    pub frontier: Vec<SearchNode>,
    pub budget_exhausted: bool,
    pub expansions: u64,
}

#[derive(Debug)]
pub enum SearchError {
    Tree(TreeError),
    Filter(FilterError),
    Io(std::io::Error),
    Checkpoint(String),
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::Tree(e) => write!(f, "{e}"),
            SearchError::Filter(e) => write!(f, "{e}"),
            SearchError::Io(e) => write!(f, "io: {e}"),
            SearchError::Checkpoint(m) => write!(f, "checkpoint: {m}"),
        }
    }
}

impl std::error::Error for SearchError {}

impl From<TreeError> for SearchError {
    fn from(e: TreeError) -> Self {
        SearchError::Tree(e)
    }
}

impl From<FilterError> for SearchError {
    fn from(e: FilterError) -> Self {
        SearchError::Filter(e)
    }
}

impl From<std::io::Error> for SearchError {
    fn from(e: std::io::Error) -> Self {
        SearchError::Io(e)
    }
}

/// Apply the pipeline to one child; verdicts recorded in pipeline order,
/// stopping at the first failure (pure predicates: order only changes the
/// attribution of the prune, never the survivor set).
fn run_pipeline(
    pres: &PcPresentation,
    config: &SearchConfig,
    fixture: Option<&ArithmeticFixture>,
) -> Result<Vec<FilterVerdict>, SearchError> {
    let mut verdicts = Vec::with_capacity(config.filters.len());
    for f in &config.filters {
        let v = match f {
            FilterSpec::Ab => {
                abelianization_filter(pres, fixture.ok_or_else(need_fixture)?)
            }
            FilterSpec::Rank => relator_bound_filter(pres, config.rmax, &config.limits)?,
            FilterSpec::Profile2 => {
                profile_filter(pres, fixture.ok_or_else(need_fixture)?, 1, config.profile_mode)?
            }
            FilterSpec::Profile4 => {
                profile_filter(pres, fixture.ok_or_else(need_fixture)?, 2, config.profile_mode)?
            }
            FilterSpec::Critical => arith_filters::filters::critical_filter(
                pres,
                fixture.ok_or_else(need_fixture)?,
                config.profile_mode,
            )?,
            FilterSpec::Capitulation => {
                capitulation_filter(pres, fixture.ok_or_else(need_fixture)?, &config.limits)?
            }
        };
        let failed = v.prunes();
        verdicts.push(v);
        if failed {
            break;
        }
    }
    Ok(verdicts)
}

fn need_fixture() -> SearchError {
    SearchError::Checkpoint("this filter needs a fixture (--fixture)".into())
}

/// Deterministic per-node sampling seed, independent of expansion order.
fn node_seed(base: u64, certificate: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in certificate.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ base
}

/// Expand one open node: enumerate or sample children, filter them, and
/// classify. Children are processed in certificate order; filtering runs on
/// the rayon pool with order-preserving collection, so the result is
/// independent of the worker count.
fn expand_node(
    node: &SearchNode,
    config: &SearchConfig,
    fixture: Option<&ArithmeticFixture>,
    stats: &mut ClassStats,
) -> Result<Vec<SearchNode>, SearchError> {
    let children: Vec<(String, PcPresentation)> = match config.mode {
        SearchMode::Exhaustive => immediate_descendants(&node.group, &config.limits)?
            .children
            .into_iter()
            .map(|c| (c.certificate, c.presentation))
            .collect(),
        SearchMode::Sampled { per_node, seed } => {
            match random_children(
                &node.group,
                per_node,
                node_seed(seed, &node.certificate()),
                &config.limits,
            ) {
                Ok(kids) => kids
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| (format!("r{i}"), p))
                    .collect(),
                Err(TreeError::TerminalParent) => Vec::new(),
                Err(e) => return Err(e.into()),
            }
        }
    };
    stats.enumerated += children.len() as u64;
    let results: Vec<Result<Vec<FilterVerdict>, SearchError>> = children
        .par_iter()
        .map(|(_, pres)| run_pipeline(pres, config, fixture))
        .collect();
    let mut out = Vec::new();
    for ((cert, pres), verdicts) in children.into_iter().zip(results) {
        let verdicts = verdicts?;
        let mut path = node.path.clone();
        path.push(cert);
        let class = pres.weight_class();
        if let Some(v) = verdicts.iter().find(|v| v.prunes()) {
            stats.bump_prune(&v.filter);
            out.push(SearchNode { group: pres, path, class, verdicts, status: NodeStatus::Pruned });
            continue;
        }
        stats.survivors += 1;
        out.push(SearchNode {
            group: pres,
            path,
            class,
            verdicts,
            status: NodeStatus::Survivor,
        });
    }
    Ok(out)
}

/// Run the breadth-first search from an open frontier. `stats` may carry
/// counts from a resumed run. Survivor nodes whose class is below max_class
/// become the next open frontier; pruned children are dropped after being
/// counted (streaming, survivor retention only).
pub fn search(
    mut frontier: Vec<SearchNode>,
    config: &SearchConfig,
    fixture: Option<&ArithmeticFixture>,
    mut stats: Vec<ClassStats>,
    mut expansions: u64,
) -> Result<SearchOutcome, SearchError> {
    loop {
        // Open nodes below the class bound, in deterministic order.
        frontier.sort_by_key(|n| (n.class, n.certificate()));
        let open_at: Option<u32> = frontier
            .iter()
            .filter(|n| n.status == NodeStatus::Open && n.class < config.max_class)
            .map(|n| n.class)
            .min();
        let Some(current_class) = open_at else {
            return Ok(SearchOutcome { stats, frontier, budget_exhausted: false, expansions });
        };
        let target_class = current_class + 1;
        if !stats.iter().any(|s| s.class == target_class) {
            stats.push(ClassStats { class: target_class, ..ClassStats::default() });
        }
        let mut next: Vec<SearchNode> = Vec::new();
        let mut rest: Vec<SearchNode> = Vec::new();
        let mut pending: Vec<SearchNode> = Vec::new();
        for n in frontier.drain(..) {
            if n.status == NodeStatus::Open && n.class == current_class {
                pending.push(n);
            } else {
                rest.push(n);
            }
        }
        let mut exhausted = false;
        for (i, node) in pending.iter().enumerate() {
            if let Some(b) = config.budget {
                if expansions >= b {
                    // Budget gone: everything not yet expanded stays open.
                    rest.extend(pending[i..].iter().cloned());
                    exhausted = true;
                    break;
                }
            }
            expansions += 1;
            let sref = stats.iter_mut().find(|s| s.class == target_class).unwrap();
            let before = sref.enumerated;
            let children = expand_node(node, config, fixture, sref)?;
            for child in children {
                match child.status {
                    NodeStatus::Survivor => next.push(child),
                    // Pruned children are counted, not retained.
                    _ => {}
                }
            }
            // Expanded interior nodes stay in the frontier, so per-class
            // survivor sets remain queryable after the run; an empty batch
            // means the node was terminal all along.
            let mut done = node.clone();
            done.status =
                if stats.iter().find(|s| s.class == target_class).unwrap().enumerated == before
                {
                    NodeStatus::Terminal
                } else {
                    NodeStatus::Survivor
                };
            rest.push(done);
        }
        // Mark survivors terminal where the covering data says so; terminal
        // nodes are kept in the frontier but never expanded.
        let checked: Vec<SearchNode> = next
            .into_par_iter()
            .map(|mut child| {
                if child.status == NodeStatus::Survivor && child.class < config.max_class {
                    match tree::is_terminal(&child.group, &config.limits) {
                        Ok(true) => child.status = NodeStatus::Terminal,
                        Ok(false) => child.status = NodeStatus::Open,
                        Err(_) => {} // stays survivor; expansion will surface the error
                    }
                }
                child
            })
            .collect();
        {
            let sref = stats.iter_mut().find(|s| s.class == target_class).unwrap();
            sref.terminal += checked.iter().filter(|n| n.status == NodeStatus::Terminal).count() as u64;
        }
        frontier = rest;
        frontier.extend(checked);
        if let Some(path) = &config.checkpoint_path {
            checkpoint::write_checkpoint(path, config, fixture, &frontier, &stats, expansions)?;
        }
        if exhausted {
            return Ok(SearchOutcome { stats, frontier, budget_exhausted: true, expansions });
        }
    }
}

/// Certificates of the nodes that survived at a class (sorted).
pub fn survivor_certificates(outcome: &SearchOutcome, class: u32) -> Vec<String> {
    let mut v: Vec<String> = outcome
        .frontier
        .iter()
        .filter(|n| {
            n.class == class
                && matches!(
                    n.status,
                    NodeStatus::Survivor | NodeStatus::Open | NodeStatus::Terminal
                )
        })
        .map(|n| n.certificate())
        .collect();
    v.sort();
    v
}
