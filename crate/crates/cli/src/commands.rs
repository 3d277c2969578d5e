use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use liargame::bounds::BoundReport;
use liargame::solver::{extract_strategy, Engine, MemoCache};
use liargame::verify::{self, VerifyConfig};
use liargame::{Error, GameState, Params};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{
    BoundsArgs, CacheAction, CliError, Format, GameArgs, PositionArgs, SolveArgs, SweepArgs,
    VerifyArgs, CACHE_DIR_ENV,
};

fn position(game: &GameArgs, pos: &PositionArgs) -> Result<(Params, GameState), CliError> {
    let params = game.params()?;
    let state = match (&pos.state, pos.n) {
        (Some(s), None) => s.parse::<GameState>()?,
        (None, Some(n)) => GameState::initial(n, params.lies),
        _ => return Err(CliError::Usage("give exactly one of --state or --n".into())),
    };
    state.check_shape(&params)?;
    Ok((params, state))
}

fn cap_label(params: &Params) -> String {
    if params.is_basic() {
        "inf".into()
    } else {
        params.cap.to_string()
    }
}

/// `$LIARGAME_CACHE_DIR/l{l}-k{k}.cache`, when the variable is set.
pub fn default_cache_path(params: &Params) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_DIR_ENV)?;
    Some(PathBuf::from(dir).join(format!("l{}-k{}.cache", params.lies, cap_label(params))))
}

fn load_cache(path: &Path, params: Params) -> Result<Option<MemoCache>, CliError> {
    if !path.exists() {
        return Ok(None);
    }
    let file = fs::File::open(path)?;
    Ok(Some(MemoCache::read_from(
        BufReader::new(file),
        Some(params),
    )?))
}

fn save_cache(path: &Path, cache: &MemoCache) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let file = fs::File::create(&tmp)?;
        cache.write_to(std::io::BufWriter::new(file))?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let (params, state) = position(&args.game, &args.position)?;
    let engine = Engine::default();
    let cache_path = args.cache.clone().or_else(|| default_cache_path(&params));
    let preloaded = match &cache_path {
        Some(p) => load_cache(p, params)?,
        None => None,
    };
    let loaded = preloaded.as_ref().map_or(0, MemoCache::len);
    let solver = match preloaded {
        Some(c) => engine.adopt_cache(Arc::new(c)),
        None => engine.solver(params),
    };
    let result = solver.solve(&state)?;
    let tree = if args.tree {
        Some(extract_strategy(&solver, &state)?)
    } else {
        None
    };

    let principal = result.principal.as_ref().map(ToString::to_string);
    match args.format {
        Format::Json => {
            let mut doc = json!({
                "state": state.to_string(),
                "lies": params.lies,
                "cap": if params.is_basic() { None } else { Some(params.cap) },
                "value": result.value,
                "principal": principal,
            });
            if args.all {
                doc["optimal_queries"] = json!(result
                    .optimal_queries
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>());
            }
            if let Some(t) = &tree {
                doc["tree_depth"] = json!(t.depth());
                doc["tree"] = t.to_json();
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Text | Format::Csv => {
            writeln!(out, "state {state} ({params})")?;
            writeln!(out, "value {}", result.value)?;
            writeln!(out, "principal {}", principal.as_deref().unwrap_or("-"))?;
            if args.all {
                let all: Vec<String> = result
                    .optimal_queries
                    .iter()
                    .map(ToString::to_string)
                    .collect();
                writeln!(
                    out,
                    "optimal {}",
                    if all.is_empty() {
                        "-".into()
                    } else {
                        all.join(" ")
                    }
                )?;
            }
            if let Some(t) = &tree {
                writeln!(out, "tree depth {} nodes {}", t.depth(), t.node_count())?;
            }
        }
    }

    if let Some(p) = &cache_path {
        let cache = solver.cache();
        if cache.len() != loaded || !p.exists() {
            save_cache(p, cache)?;
        }
        writeln!(
            err,
            "cache {}: {} entries, {} new",
            p.display(),
            cache.len(),
            cache.len() - loaded
        )?;
    }
    Ok(())
}

fn report_text(r: &BoundReport) -> String {
    let opt = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
    format!(
        "n={} k={} l={}\nL {}\nL+ {}\nL^ {}\nL~ {}\nlarge-n applicable {}\nlarge-n value {}\nexact {}\n",
        r.n,
        r.k,
        r.lies,
        r.l,
        r.l_plus,
        r.l_hat,
        opt(r.l_tilde),
        r.theorem2_applicable,
        opt(r.theorem2_value),
        opt(r.exact)
    )
}

pub fn bounds(args: &BoundsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let engine = Engine::default();
    let report = engine.bound_report(args.n, args.cap, args.lies)?;
    let violations = report.violations();
    match args.format {
        Format::Json => {
            let mut doc = serde_json::to_value(&report).expect("json");
            doc["violations"] = json!(violations);
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Csv => {
            let row = SweepRow::from_result(args.n, args.cap, args.lies, Ok(report));
            let mut w = csv::Writer::from_writer(out);
            w.serialize(row)?;
            w.flush()?;
        }
        Format::Text => {
            write!(out, "{}", report_text(&report))?;
            for v in violations {
                writeln!(out, "violated {v}")?;
            }
        }
    }
    Ok(())
}

/// One sweep cell; a cell outside the bounds' domain keeps only its error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub k: u64,
    pub lies: usize,
    pub l: Option<u32>,
    pub l_plus: Option<u32>,
    pub l_hat: Option<u32>,
    pub l_tilde: Option<u32>,
    pub theorem2_applicable: Option<bool>,
    pub theorem2_value: Option<u32>,
    pub exact: Option<u32>,
    /// Every sandwich holds; empty when the exact value is unavailable.
    pub sandwich_ok: Option<bool>,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_result(n: u64, k: u64, lies: usize, r: Result<BoundReport, Error>) -> Self {
        match r {
            Ok(r) => SweepRow {
                n,
                k,
                lies,
                l: Some(r.l),
                l_plus: Some(r.l_plus),
                l_hat: Some(r.l_hat),
                l_tilde: r.l_tilde,
                theorem2_applicable: Some(r.theorem2_applicable),
                theorem2_value: r.theorem2_value,
                exact: r.exact,
                sandwich_ok: r.exact.map(|_| r.violations().is_empty()),
                error: None,
            },
            Err(e) => SweepRow {
                n,
                k,
                lies,
                l: None,
                l_plus: None,
                l_hat: None,
                l_tilde: None,
                theorem2_applicable: None,
                theorem2_value: None,
                exact: None,
                sandwich_ok: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// `a..b` (inclusive), `a`, or a comma list of either.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad range `{s}`; expected a..b or a,b,c"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.parse().map_err(|_| bad())?;
            let b: u64 = b.trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn sweep_rows(engine: &Engine, ns: &[u64], caps: &[u64], lies: &[usize]) -> Vec<SweepRow> {
    let mut cells = Vec::new();
    for &l in lies {
        for &k in caps {
            for &n in ns {
                cells.push((n, k, l));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(n, k, l)| SweepRow::from_result(n, k, l, engine.bound_report(n, k, l)))
        .collect()
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ns = parse_range(&args.n)?;
    let caps = parse_range(&args.cap)?;
    let lies: Vec<usize> = parse_range(&args.lies)?
        .into_iter()
        .map(|l| l as usize)
        .collect();
    let engine = Engine::default();
    let rows = sweep_rows(&engine, &ns, &caps, &lies);
    match args.format {
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&rows).expect("json")
        )?,
        Format::Csv | Format::Text => {
            let mut w = csv::Writer::from_writer(out);
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut config = VerifyConfig {
        only: args.only.clone(),
        ..VerifyConfig::default()
    };
    for b in &args.budget {
        config.set_budget(b)?;
    }
    let engine = Engine::default();
    let reports = verify::run(&engine, &config)?;
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&reports).expect("json")
    )?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}

fn resolve_path(path: Option<PathBuf>, params: &Params) -> Result<PathBuf, CliError> {
    path.or_else(|| default_cache_path(params))
        .ok_or_else(|| CliError::Usage(format!("no --path given and {CACHE_DIR_ENV} is unset")))
}

fn read_any(path: &Path) -> Result<MemoCache, CliError> {
    let file = fs::File::open(path)?;
    Ok(MemoCache::read_from(BufReader::new(file), None)?)
}

pub fn cache(
    action: CacheAction,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    match action {
        CacheAction::Build {
            game,
            position: pos,
            path,
        } => {
            let (params, state) = position(&game, &pos)?;
            let path = resolve_path(path, &params)?;
            let engine = Engine::default();
            let solver = match load_cache(&path, params)? {
                Some(c) => engine.adopt_cache(Arc::new(c)),
                None => engine.solver(params),
            };
            // a full solve, so later `solve` calls on this position stay warm
            let value = solver.solve(&state)?.value;
            save_cache(&path, solver.cache())?;
            writeln!(out, "value {value}")?;
            writeln!(
                err,
                "wrote {} entries to {}",
                solver.cache().len(),
                path.display()
            )?;
        }
        CacheAction::Inspect { path } => {
            let cache = read_any(&path)?;
            let entries = cache.sorted_entries();
            writeln!(out, "header {}", MemoCache::header(&cache.params()))?;
            writeln!(out, "entries {}", entries.len())?;
            let max = entries.iter().map(|(_, v)| *v).max();
            writeln!(
                out,
                "max value {}",
                max.map_or("-".into(), |v| v.to_string())
            )?;
        }
        CacheAction::Export { path, out: dest } => {
            let cache = read_any(&path)?;
            match dest {
                Some(d) => save_cache(&d, &cache)?,
                None => cache.write_to(out)?,
            }
        }
        CacheAction::Import { from, game, path } => {
            let params = game.params()?;
            let file = fs::File::open(&from)?;
            let cache = MemoCache::read_from(BufReader::new(file), Some(params))?;
            let dest = resolve_path(path, &params)?;
            save_cache(&dest, &cache)?;
            writeln!(
                err,
                "imported {} entries into {}",
                cache.len(),
                dest.display()
            )?;
        }
    }
    Ok(())
}
