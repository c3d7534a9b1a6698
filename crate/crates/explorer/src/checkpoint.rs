//! Versioned text checkpoints with atomic writes (write-new then rename).
//! A reload immediately re-saved is byte-identical, and a resumed run must
//! reproduce the statistics of an uninterrupted one.

use std::io::Write;
use std::path::Path;

use arith_filters::ArithmeticFixture;
use pc_core::PcPresentation;

use crate::{ClassStats, NodeStatus, SearchConfig, SearchError, SearchMode, SearchNode};

const VERSION: &str = "towersearch-checkpoint v1";

/// FNV-1a over the fixture's canonical content (profiles and kernels), so a
/// checkpoint refuses to resume against different truth data.
pub fn fixture_hash(fixture: Option<&ArithmeticFixture>) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |s: &str| {
        for b in s.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    match fixture {
        None => eat("none"),
        Some(f) => {
            eat(&format!("{}|{}|", f.prime, f.target_ab));
            for ab in &f.index2_profile {
                eat(&format!("{ab},"));
            }
            eat("|");
            for ab in &f.index4_profile {
                eat(&format!("{ab},"));
            }
            for c in &f.critical_profiles {
                eat(&format!("|{}:", c.ab));
                for ab in &c.maximal_profile {
                    eat(&format!("{ab},"));
                }
            }
            if let Some(entries) = &f.capitulation {
                for e in entries {
                    eat(&format!("|cap{}:{}", e.subgroup_ab, e.kernel_invariants));
                }
            }
        }
    }
    h
}

pub fn render(
    config: &SearchConfig,
    fixture: Option<&ArithmeticFixture>,
    frontier: &[SearchNode],
    stats: &[ClassStats],
    expansions: u64,
) -> String {
    let mut s = String::new();
    s.push_str(VERSION);
    s.push('\n');
    s.push_str(&format!("fixture-hash {:016x}\n", fixture_hash(fixture)));
    let (mode, per_node, seed) = match config.mode {
        SearchMode::Exhaustive => ("exhaustive", 0, 0),
        SearchMode::Sampled { per_node, seed } => ("sampled", per_node, seed),
    };
    let filters: Vec<&str> = config.filters.iter().map(|f| f.name()).collect();
    s.push_str(&format!(
        "config max-class {} mode {mode} per-node {per_node} seed {seed} rmax {} filters {}\n",
        config.max_class,
        config.rmax,
        if filters.is_empty() { "-".to_string() } else { filters.join(",") },
    ));
    s.push_str(&format!("expansions {expansions}\n"));
    let mut sorted_stats: Vec<&ClassStats> = stats.iter().collect();
    sorted_stats.sort_by_key(|c| c.class);
    for st in sorted_stats {
        let mut pruned: Vec<(String, u64)> = st.pruned.clone();
        pruned.sort();
        let pruned_str = if pruned.is_empty() {
            "-".to_string()
        } else {
            pruned.iter().map(|(n, c)| format!("{n}={c}")).collect::<Vec<_>>().join(",")
        };
        s.push_str(&format!(
            "stats class {} enumerated {} survivors {} terminal {} pruned {}\n",
            st.class, st.enumerated, st.survivors, st.terminal, pruned_str
        ));
    }
    let mut nodes: Vec<&SearchNode> = frontier.iter().collect();
    nodes.sort_by_key(|n| (n.class, n.certificate()));
    for n in nodes {
        let path = if n.path.is_empty() { "-".to_string() } else { n.path.join("/") };
        s.push_str(&format!("node {} {} {}\n", n.status.tag(), n.class, path));
        s.push_str("pcp-begin\n");
        s.push_str(&n.group.to_canonical_text());
        s.push_str("pcp-end\n");
    }
    s.push_str("end-checkpoint\n");
    s
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_checkpoint(
    path: &Path,
    config: &SearchConfig,
    fixture: Option<&ArithmeticFixture>,
    frontier: &[SearchNode],
    stats: &[ClassStats],
    expansions: u64,
) -> Result<(), SearchError> {
    let text = render(config, fixture, frontier, stats, expansions);
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug)]
pub struct LoadedCheckpoint {
    pub frontier: Vec<SearchNode>,
    pub stats: Vec<ClassStats>,
    pub expansions: u64,
    pub fixture_hash: u64,
}

pub fn load_checkpoint(
    path: &Path,
    fixture: Option<&ArithmeticFixture>,
) -> Result<LoadedCheckpoint, SearchError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().peekable();
    let bad = |m: &str| SearchError::Checkpoint(m.to_string());
    if lines.next() != Some(VERSION) {
        return Err(bad("version mismatch"));
    }
    let hash_line = lines.next().ok_or_else(|| bad("missing fixture hash"))?;
    let hash = u64::from_str_radix(
        hash_line.strip_prefix("fixture-hash ").ok_or_else(|| bad("missing fixture hash"))?,
        16,
    )
    .map_err(|_| bad("bad fixture hash"))?;
    if hash != fixture_hash(fixture) {
        return Err(bad("fixture hash mismatch: refusing to resume against different truth data"));
    }
    let _config_line = lines.next().ok_or_else(|| bad("missing config line"))?;
    let exp_line = lines.next().ok_or_else(|| bad("missing expansions"))?;
    let expansions: u64 = exp_line
        .strip_prefix("expansions ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("bad expansions line"))?;
    let mut stats = Vec::new();
    let mut frontier = Vec::new();
    let mut saw_end = false;
    while let Some(line) = lines.next() {
        if line == "end-checkpoint" {
            saw_end = true;
            break;
        }
        if let Some(rest) = line.strip_prefix("stats ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            // class C enumerated E survivors S terminal T pruned LIST
            if toks.len() != 10 || toks[0] != "class" {
                return Err(bad("malformed stats line"));
            }
            let mut st = ClassStats {
                class: toks[1].parse().map_err(|_| bad("stats class"))?,
                enumerated: toks[3].parse().map_err(|_| bad("stats enumerated"))?,
                survivors: toks[5].parse().map_err(|_| bad("stats survivors"))?,
                terminal: toks[7].parse().map_err(|_| bad("stats terminal"))?,
                pruned: Vec::new(),
            };
            if toks[9] != "-" {
                for part in toks[9].split(',') {
                    let (name, count) =
                        part.split_once('=').ok_or_else(|| bad("stats pruned entry"))?;
                    st.pruned.push((
                        name.to_string(),
                        count.parse().map_err(|_| bad("stats pruned count"))?,
                    ));
                }
            }
            stats.push(st);
            continue;
        }
        if let Some(rest) = line.strip_prefix("node ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(bad("malformed node line"));
            }
            let status = NodeStatus::from_tag(toks[0]).ok_or_else(|| bad("node status"))?;
            let class: u32 = toks[1].parse().map_err(|_| bad("node class"))?;
            let path: Vec<String> = if toks[2] == "-" {
                Vec::new()
            } else {
                toks[2].split('/').map(str::to_string).collect()
            };
            if lines.next() != Some("pcp-begin") {
                return Err(bad("expected pcp-begin"));
            }
            let mut pcp_text = String::new();
            loop {
                match lines.next() {
                    Some("pcp-end") => break,
                    Some(l) => {
                        pcp_text.push_str(l);
                        pcp_text.push('\n');
                    }
                    None => return Err(bad("unterminated presentation block")),
                }
            }
            let group = PcPresentation::parse(&pcp_text)
                .map_err(|e| bad(&format!("presentation in node: {e}")))?;
            frontier.push(SearchNode { group, path, class, verdicts: Vec::new(), status });
            continue;
        }
        return Err(bad(&format!("unexpected line `{line}`")));
    }
    if !saw_end {
        return Err(bad("truncated checkpoint (no end marker)"));
    }
    Ok(LoadedCheckpoint { frontier, stats, expansions, fixture_hash: hash })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_byte_identical() {
        let root = SearchNode::root(PcPresentation::elementary_abelian(2, 2));
        let config = SearchConfig::default();
        let stats = vec![ClassStats { class: 2, enumerated: 7, survivors: 7, ..Default::default() }];
        let dir = std::env::temp_dir().join(format!("cp-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.ckpt");
        write_checkpoint(&path, &config, None, &[root], &stats, 1).unwrap();
        let loaded = load_checkpoint(&path, None).unwrap();
        let original = std::fs::read_to_string(&path).unwrap();
        let resaved =
            render(&config, None, &loaded.frontier, &loaded.stats, loaded.expansions);
        assert_eq!(original, resaved, "save immediately after load must be identical bytes");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn refuses_fixture_mismatch() {
        let root = SearchNode::root(PcPresentation::elementary_abelian(2, 2));
        let config = SearchConfig::default();
        let dir = std::env::temp_dir().join(format!("cp-test2-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("b.ckpt");
        write_checkpoint(&path, &config, None, &[root], &[], 0).unwrap();
        let fixture = ArithmeticFixture::q5460();
        let err = load_checkpoint(&path, Some(&fixture));
        assert!(err.is_err(), "must refuse to resume against a different fixture");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn refuses_truncation() {
        let root = SearchNode::root(PcPresentation::elementary_abelian(2, 2));
        let config = SearchConfig::default();
        let dir = std::env::temp_dir().join(format!("cp-test3-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.ckpt");
        write_checkpoint(&path, &config, None, &[root], &[], 0).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let truncated = &text[..text.len() - 20];
        std::fs::write(&path, truncated).unwrap();
        assert!(load_checkpoint(&path, None).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
