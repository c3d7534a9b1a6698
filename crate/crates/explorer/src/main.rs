//! towersearch: descendant-tree search with arithmetic pruning.
//!
//! Subcommands: pquotient, children, report, search, moribund, conj91.
//! Group sources are canonical .pcp files, finitely presented inputs
//! (builtin names or files) at a class (`koch-q2@2`),  and presentation
//! text files. Exit codes: 0 pass, 1 error, 2 fail, 3 budget exhausted.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use arith_filters::{ArithmeticFixture, MatchMode};
use explorer::checkpoint::{load_checkpoint, write_checkpoint};
use explorer::report::{render_conj91, report};
use explorer::{search, FilterSpec, SearchConfig, SearchMode, SearchNode};
use pc_core::PcPresentation;
use tree::{fp, is_moribund, p_quotient, Limits, MoribundVerdict};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        usage();
        return ExitCode::from(1);
    }
    let (cmd, rest) = (args[0].as_str(), &args[1..]);
    let result = match cmd {
        "pquotient" => cmd_pquotient(rest),
        "children" => cmd_children(rest),
        "report" => cmd_report(rest),
        "search" => cmd_search(rest),
        "moribund" => cmd_moribund(rest),
        "conj91" => cmd_conj91(rest),
        "help" | "--help" | "-h" => {
            usage();
            Ok(ExitCode::SUCCESS)
        }
        other => {
            eprintln!("unknown command `{other}`");
            usage();
            Ok(ExitCode::from(1))
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

fn usage() {
    eprintln!(
        "towersearch — finite 2-group descendant search with arithmetic pruning

USAGE:
  towersearch pquotient <fp-src> [-p P] [-c C] [--out FILE] [--json]
  towersearch children  <group-src> [--max-ngens N] [--json]
  towersearch report    <group-src> [--depth D] [--max-ngens N] [--json]
  towersearch search    <group-src> --max-class N [--fixture PATH|q5460]
                        [--filters ab,rank,profile2,profile4,critical,capitulation]
                        [--rmax R] [--match exact|compatible] [--budget M]
                        [--sampled K --seed S] [--workers W]
                        [--checkpoint PATH] [--resume] [--max-ngens N]
                        [--stats-json PATH]
  towersearch moribund  <group-src> [--depth D] [--max-ngens N]
  towersearch conj91    <group-src> [--max-ngens N]

A <group-src> is a canonical .pcp file or `<fp>@<class>` where <fp> is a
built-in name (koch-q2, conj72-1, conj72-2, ex93, free-1..free-4) or a file
with a presentation like `a,b | a^2, (b,a,a)`."
    );
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn parse_flags(rest: &[String]) -> Result<(Vec<String>, HashMap<String, String>), String> {
    let mut positional = Vec::new();
    let mut flags = HashMap::new();
    let mut i = 0;
    let boolean = ["--json", "--resume"];
    while i < rest.len() {
        let a = &rest[i];
        if let Some(name) = a.strip_prefix("--") {
            if boolean.contains(&a.as_str()) {
                flags.insert(name.to_string(), "true".to_string());
                i += 1;
            } else {
                let v = rest.get(i + 1).ok_or_else(|| format!("flag --{name} needs a value"))?;
                flags.insert(name.to_string(), v.clone());
                i += 2;
            }
        } else if let Some(name) = a.strip_prefix('-') {
            let v = rest.get(i + 1).ok_or_else(|| format!("flag -{name} needs a value"))?;
            flags.insert(name.to_string(), v.clone());
            i += 2;
        } else {
            positional.push(a.clone());
            i += 1;
        }
    }
    Ok((positional, flags))
}

fn limits_from(flags: &HashMap<String, String>) -> Result<Limits, String> {
    let mut limits = Limits::default();
    if let Some(n) = flags.get("max-ngens") {
        limits.max_ngens = n.parse().map_err(|_| "bad --max-ngens".to_string())?;
    }
    Ok(limits)
}

/// Load an fp presentation from a builtin name or a file.
fn load_fp(src: &str) -> Result<fp::FpPresentation, Box<dyn std::error::Error>> {
    if let Some(b) = fp::builtin(src) {
        return Ok(b);
    }
    let text = std::fs::read_to_string(src)
        .map_err(|e| format!("`{src}` is not a builtin ({}) and not readable: {e}", fp::builtin_names().join(", ")))?;
    Ok(fp::FpPresentation::parse(&text)?)
}

/// Resolve a group source: .pcp file, or fp@class.
fn load_group(src: &str, limits: &Limits) -> Result<PcPresentation, Box<dyn std::error::Error>> {
    if let Some((fp_src, class)) = src.rsplit_once('@') {
        let class: u32 = class.trim_start_matches('c').parse().map_err(|_| "bad class in group source")?;
        let fpres = load_fp(fp_src)?;
        let q = p_quotient(&fpres, 2, class, limits)?;
        return Ok(q.group);
    }
    let text = std::fs::read_to_string(src)?;
    if text.starts_with("pcpresentation") {
        return Ok(PcPresentation::parse(&text)?);
    }
    Err(format!("`{src}` is not a canonical presentation file; use `<fp>@<class>` for quotients").into())
}

fn cmd_pquotient(rest: &[String]) -> CmdResult {
    let (pos, flags) = parse_flags(rest)?;
    let src = pos.first().ok_or("pquotient needs a presentation source")?;
    let p: u32 = flags.get("p").map_or(Ok(2), |v| v.parse()).map_err(|_| "bad -p")?;
    let c: u32 = flags.get("c").map_or(Ok(1), |v| v.parse()).map_err(|_| "bad -c")?;
    let limits = limits_from(&flags)?;
    let fpres = load_fp(src)?;
    let q = p_quotient(&fpres, p, c, &limits)?;
    let cov = tree::cover::p_covering_group(&q.group, &limits)?;
    let ab = pc_core::abelian::abelian_invariants(&q.group);
    if flags.contains_key("json") {
        println!(
            "{}",
            serde_json::json!({
                "source": src,
                "class": c,
                "order_exponent": q.group.order_exponent(),
                "p_class": q.group.p_class(),
                "abelianization": ab.to_string(),
                "multiplicator_rank": cov.multiplicator_rank(),
                "nuclear_rank": cov.nuclear_rank(),
                "stabilized": q.stabilized,
            })
        );
    } else {
        println!(
            "{src} at class {c}: order {p}^{}, p-class {}, abelianization {ab}",
            q.group.order_exponent(),
            q.group.p_class()
        );
        println!(
            "p-multiplicator rank {}, nuclear rank {}{}",
            cov.multiplicator_rank(),
            cov.nuclear_rank(),
            if q.stabilized { " (quotient stabilized below the requested class)" } else { "" }
        );
    }
    if let Some(out) = flags.get("out") {
        std::fs::write(out, q.group.to_canonical_text())?;
        eprintln!("wrote {out}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_children(rest: &[String]) -> CmdResult {
    let (pos, flags) = parse_flags(rest)?;
    let src = pos.first().ok_or("children needs a group source")?;
    let limits = limits_from(&flags)?;
    let group = load_group(src, &limits)?;
    let batch = tree::immediate_descendants(&group, &limits)?;
    let mut by_order: std::collections::BTreeMap<usize, usize> = Default::default();
    for c in &batch.children {
        *by_order.entry(c.presentation.order_exponent()).or_default() += 1;
    }
    if flags.contains_key("json") {
        println!(
            "{}",
            serde_json::json!({
                "source": src,
                "children": batch.children.len(),
                "by_order_exponent": by_order.iter().map(|(k, v)| (k.to_string(), v)).collect::<HashMap<_,_>>(),
            })
        );
    } else {
        println!("{} immediate descendants", batch.children.len());
        for (ord, count) in &by_order {
            println!("  order 2^{ord}: {count}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(rest: &[String]) -> CmdResult {
    let (pos, flags) = parse_flags(rest)?;
    let src = pos.first().ok_or("report needs a group source")?;
    let limits = limits_from(&flags)?;
    let depth: u32 = flags.get("depth").map_or(Ok(1), |v| v.parse()).map_err(|_| "bad --depth")?;
    let group = load_group(src, &limits)?;
    let r = report(&group, &limits, depth)?;
    if flags.contains_key("json") {
        println!("{}", r.render_json(group.prime()));
    } else {
        print!("{}", r.render_text(group.prime()));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_fixture(spec: &str) -> Result<ArithmeticFixture, Box<dyn std::error::Error>> {
    if spec == "q5460" {
        return Ok(ArithmeticFixture::q5460());
    }
    let text = std::fs::read_to_string(spec)?;
    Ok(ArithmeticFixture::from_json(&text)?)
}

fn cmd_search(rest: &[String]) -> CmdResult {
    let (pos, flags) = parse_flags(rest)?;
    let src = pos.first().ok_or("search needs a root group source")?;
    let limits = limits_from(&flags)?;
    let mut config = SearchConfig {
        max_class: flags
            .get("max-class")
            .ok_or("search needs --max-class")?
            .parse()
            .map_err(|_| "bad --max-class")?,
        limits,
        ..SearchConfig::default()
    };
    if let Some(f) = flags.get("filters") {
        config.filters = FilterSpec::parse_list(f)?;
    }
    if let Some(r) = flags.get("rmax") {
        config.rmax = r.parse().map_err(|_| "bad --rmax")?;
    }
    if let Some(m) = flags.get("match") {
        config.profile_mode = match m.as_str() {
            "exact" => MatchMode::Exact,
            "compatible" => MatchMode::QuotientCompatible,
            _ => return Err("--match must be exact or compatible".into()),
        };
    }
    if let Some(b) = flags.get("budget") {
        config.budget = Some(b.parse().map_err(|_| "bad --budget")?);
    }
    if let Some(k) = flags.get("sampled") {
        let per_node = k.parse().map_err(|_| "bad --sampled")?;
        let seed = flags.get("seed").map_or(Ok(0), |v| v.parse()).map_err(|_| "bad --seed")?;
        config.mode = SearchMode::Sampled { per_node, seed };
    }
    if let Some(p) = flags.get("checkpoint") {
        config.checkpoint_path = Some(PathBuf::from(p));
    }
    let fixture = flags.get("fixture").map(|f| load_fixture(f)).transpose()?;
    let needs_fixture = config.filters.iter().any(|f| !matches!(f, FilterSpec::Rank));
    if needs_fixture && fixture.is_none() {
        return Err("these filters need --fixture (a file or the builtin `q5460`)".into());
    }
    let workers: usize = flags.get("workers").map_or(Ok(0), |v| v.parse()).map_err(|_| "bad --workers")?;

    let (frontier, stats, expansions) = if flags.contains_key("resume") {
        let path = config
            .checkpoint_path
            .as_ref()
            .ok_or("--resume needs --checkpoint")?;
        let loaded = load_checkpoint(path, fixture.as_ref())?;
        (loaded.frontier, loaded.stats, loaded.expansions)
    } else {
        let group = load_group(src, &config.limits)?;
        let root = SearchNode::root(group);
        if let Some(path) = &config.checkpoint_path {
            write_checkpoint(path, &config, fixture.as_ref(), &[root.clone()], &[], 0)?;
        }
        (vec![root], Vec::new(), 0)
    };

    let run = || search(frontier, &config, fixture.as_ref(), stats, expansions);
    let outcome = if workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build()?.install(run)?
    } else {
        run()?
    };

    let mut sorted = outcome.stats.clone();
    sorted.sort_by_key(|s| s.class);
    for st in &sorted {
        let mut pruned = st.pruned.clone();
        pruned.sort();
        let detail = pruned
            .iter()
            .map(|(n, c)| format!("{n} -{c}"))
            .collect::<Vec<_>>()
            .join(", ");
        println!(
            "class {}: enumerated {}, survivors {}, terminal {}{}",
            st.class,
            st.enumerated,
            st.survivors,
            st.terminal,
            if detail.is_empty() { String::new() } else { format!("  [{detail}]") }
        );
    }
    if let Some(path) = flags.get("stats-json") {
        let json = serde_json::json!({
            "budget_exhausted": outcome.budget_exhausted,
            "expansions": outcome.expansions,
            "classes": sorted.iter().map(|s| serde_json::json!({
                "class": s.class,
                "enumerated": s.enumerated,
                "survivors": s.survivors,
                "terminal": s.terminal,
                "pruned": s.pruned.iter().cloned().collect::<HashMap<String, u64>>(),
            })).collect::<Vec<_>>(),
            "survivors": explorer::survivor_certificates(&outcome, config.max_class),
        });
        std::fs::write(path, serde_json::to_string_pretty(&json)?)?;
    }
    if outcome.budget_exhausted {
        eprintln!("budget exhausted; checkpoint holds the frontier");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_moribund(rest: &[String]) -> CmdResult {
    let (pos, flags) = parse_flags(rest)?;
    let src = pos.first().ok_or("moribund needs a group source")?;
    let limits = limits_from(&flags)?;
    let depth: u32 = flags.get("depth").map_or(Ok(1), |v| v.parse()).map_err(|_| "bad --depth")?;
    let group = load_group(src, &limits)?;
    match is_moribund(&group, depth, &limits)? {
        MoribundVerdict::Moribund { at_depth } => {
            println!("moribund: covering chain reaches nuclear rank 0 at depth {at_depth}");
            Ok(ExitCode::SUCCESS)
        }
        MoribundVerdict::Unknown => {
            println!("unknown: no terminal cover within depth {depth} (one-sided test)");
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_conj91(rest: &[String]) -> CmdResult {
    let (pos, flags) = parse_flags(rest)?;
    let src = pos.first().ok_or("conj91 needs a group source")?;
    let limits = limits_from(&flags)?;
    let group = load_group(src, &limits)?;
    let r = arith_filters::conjecture91_check(&group, 1 << 24)?;
    print!("{}", render_conj91(&r, group.prime()));
    if r.within_bound && r.abelian {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}
