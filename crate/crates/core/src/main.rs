use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use spheromorph::genposet::GenPoset;
use spheromorph::groups::json::{parse_element, to_json};
use spheromorph::groups::random::random_element;
use spheromorph::groups::{stabilizer_test, subnormal_depth, Config, LocalSimilarity};
use spheromorph::homology::{
    betti_csv, is_k_acyclic, pi1_report, reduced_homology, BettiRow, HomologyResult, Pi1Report,
};
use spheromorph::spheroposet::{
    build_cn, count_equivariant_cells, enumerate_desc_link, enumerate_desc_link_star, nu_bound, DEFAULT_LINK_CAP,
    DEFAULT_ORBIT_CAP,
};
use spheromorph::trading::{euler_characteristic, run_staircase, sparsify, FiltrationSchedule};
use spheromorph::Error;

const OUT_DIR_VAR: &str = "SPHERO_OUT_DIR";

#[derive(Parser)]
#[command(name = "spheromorph", version, about = "Descending-link complexes, homology certificates and cell trading")]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GroupFlags {
    /// Tree valence.
    #[arg(long)]
    q: usize,

    /// `sym`, `triv`, or comma-separated generator words such as `21`.
    #[arg(long, default_value = "sym")]
    subgroup: String,

    /// Number of root summands.
    #[arg(long, default_value_t = 1)]
    r: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build the decorated complex C_n.
    BuildCn {
        #[command(flatten)]
        group: GroupFlags,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the connectivity bound on C_n for every n up to nmax.
    VerifyNu {
        #[command(flatten)]
        group: GroupFlags,
        #[arg(long)]
        nmax: usize,
        /// Step budget for the fundamental group search.
        #[arg(long, default_value_t = 20_000)]
        pi1_budget: usize,
        /// Largest admissible nmax; defaults to 11 for q=2 and 9 for q=3.
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the descending link of a sphero-vertex.
    Desclink {
        #[command(flatten)]
        group: GroupFlags,
        #[arg(long)]
        n: usize,
        /// Star model: very elementary blocks only.
        #[arg(long)]
        star: bool,
        /// Full model: all split records.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = DEFAULT_LINK_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Homology table; defaults next to the JSON output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Group element arithmetic on JSON elements (files or inline JSON).
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Sparsify a filtration schedule and run the cell-trading staircase.
    Trade {
        #[arg(long)]
        schedule: PathBuf,
        /// Number of sparsified stages to process; defaults to all.
        #[arg(long)]
        prefix: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count orbits of nondegenerate d-simplices of the level-k truncation.
    CountCells {
        #[command(flatten)]
        group: GroupFlags,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GroupOp {
    Compose { a: String, b: String, #[arg(long)] out: Option<PathBuf> },
    Inverse { a: String, #[arg(long)] out: Option<PathBuf> },
    Canon { a: String, #[arg(long)] out: Option<PathBuf> },
    /// Does `gamma` stabilize the class of `phi`?
    Stab { gamma: String, phi: String, #[arg(long)] out: Option<PathBuf> },
    Subnormal { phi: String, #[arg(long)] k: usize, #[arg(long)] out: Option<PathBuf> },
    /// A seeded random element.
    Random {
        #[command(flatten)]
        group: GroupFlags,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run: exit code and message.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => 3,
            Error::Unreachable(_) | Error::NotSparsified { .. } => 4,
            Error::Postcondition(_) | Error::BoundaryNotClosed { .. } => 1,
            _ => 2,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = Result<bool, Failure>;

#[derive(Serialize)]
struct RunManifest {
    command: String,
    params: BTreeMap<String, String>,
    paths: BTreeMap<String, String>,
    seed: u64,
    version: &'static str,
}

impl RunManifest {
    fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            params: BTreeMap::new(),
            paths: BTreeMap::new(),
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn group(self, g: &GroupFlags, config: &Config) -> Self {
        self.param("q", g.q)
            .param("r", g.r)
            .param("subgroup", &g.subgroup)
            .param("order_D", config.group().order())
    }

    fn json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

/// Where an output goes: an explicit path, the default directory, or stdout.
fn resolve(out: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    match out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUT_DIR_VAR).map(|d| Path::new(&d).join(default_name)),
    }
}

fn write_atomic(path: &Path, body: &str) -> Result<(), Failure> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    let name = path.file_name().ok_or_else(|| Failure::usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(body.as_bytes()).and_then(|()| f.sync_all()))
        .and_then(|()| fs::rename(&tmp, path));
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::usage(format!("{}: {e}", path.display()))
    })
}

fn emit(path: Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_atomic(&p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn path_string(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn json_doc(mut manifest: RunManifest, out: Option<PathBuf>, result: Value) -> Result<(), Failure> {
    manifest.paths.insert("out".into(), path_string(&out));
    let doc = json!({ "manifest": manifest, "result": result });
    emit(out, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))
}

fn csv_doc(manifest: &RunManifest, out: Option<PathBuf>, body: &str) -> Result<(), Failure> {
    emit(out, &format!("# {}\n{body}", manifest.json()))
}

fn config(g: &GroupFlags) -> Result<Arc<Config>, Failure> {
    Ok(Config::from_subgroup_spec(g.q, g.r, &g.subgroup)?.shared())
}

fn read_input(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn element(arg: &str) -> Result<LocalSimilarity, Failure> {
    Ok(parse_element(&read_input(arg)?)?)
}

fn homology_json(h: &HomologyResult) -> Value {
    serde_json::to_value(h).expect("homology serializes")
}

fn cmd_build_cn(seed: u64, g: &GroupFlags, n: usize, format: Format, out: &Option<PathBuf>) -> CmdResult {
    let config = config(g)?;
    let c = build_cn(config.clone(), n)?;
    let mut manifest = RunManifest::new("build-cn", seed).group(g, &config).param("n", n);
    let tag = format!("cn_q{}_{}_n{n}", g.q, g.subgroup.replace(',', "-"));
    eprintln!("C_{n}: {} vertices, {} edges", c.vertices.len(), c.edges.len());
    match format {
        Format::Json => {
            let out = resolve(out, &format!("{tag}.json"));
            json_doc(manifest, out, serde_json::to_value(c.to_json()).expect("json"))?;
        }
        Format::Csv => {
            let out = resolve(out, &format!("{tag}.csv"));
            manifest.paths.insert("out".into(), path_string(&out));
            csv_doc(&manifest, out, &c.edges_csv())?;
        }
    }
    Ok(true)
}

fn default_guard(q: usize) -> usize {
    match q {
        2 => 11,
        3 => 9,
        _ => 3 * q,
    }
}

fn cmd_verify_nu(
    seed: u64,
    g: &GroupFlags,
    nmax: usize,
    budget: usize,
    max_n: Option<usize>,
    out: &Option<PathBuf>,
) -> CmdResult {
    let config = config(g)?;
    let guard = max_n.unwrap_or_else(|| default_guard(g.q));
    if nmax > guard {
        return Err(Failure::new(3, format!("nmax {nmax} exceeds the resource guard {guard} (raise with --max-n)")));
    }
    let mut body = String::from("n,nu,vertices,edges,nonempty,reduced_betti,torsion,acyclic,pi1,pass\n");
    let mut all_pass = true;
    for n in 1..=nmax {
        let nu = nu_bound(&config, n);
        let c = build_cn(config.clone(), n)?;
        let through = (nu + 1).max(0) as usize;
        let chains = c.chain_complex(through + 1)?;
        let acyclic = is_k_acyclic(&chains, nu)?;
        // the degree above the bound may exceed the elimination budget
        let (h, top_known) = match reduced_homology(&chains, through) {
            Ok(h) => (h, true),
            Err(Error::CapExceeded { what, value, cap }) if nu >= 0 => {
                eprintln!("n={n}: degree {through} skipped ({what} {value} > {cap})");
                (reduced_homology(&chains, nu as usize)?, false)
            }
            Err(e) => return Err(e.into()),
        };
        let nonempty = !c.is_empty();
        let pi1 = if nu >= 1 && nonempty {
            match pi1_report(&chains, budget)? {
                Pi1Report::Trivial => "trivial",
                Pi1Report::Nontrivial { .. } => "nontrivial",
                Pi1Report::Unknown { .. } => "unknown",
            }
        } else {
            "n/a"
        };
        let pass = nonempty == (n >= g.q) && acyclic.acyclic == (n >= g.q) && pi1 != "nontrivial";
        all_pass &= pass;
        let mut betti: Vec<String> = h.degrees.iter().map(|d| d.betti.to_string()).collect();
        let mut torsion: Vec<String> = h
            .degrees
            .iter()
            .map(|d| d.torsion.iter().map(ToString::to_string).collect::<Vec<_>>().join("x"))
            .collect();
        if !top_known {
            betti.push("?".into());
            torsion.push("?".into());
        }
        writeln!(
            body,
            "{n},{nu},{},{},{nonempty},{},{},{},{pi1},{pass}",
            c.vertices.len(),
            c.edges.len(),
            betti.join(";"),
            torsion.join(";"),
            acyclic.acyclic
        )
        .expect("string write");
        eprintln!("n={n} nu={nu} pass={pass}");
    }
    let mut manifest = RunManifest::new("verify-nu", seed)
        .group(g, &config)
        .param("nmax", nmax)
        .param("pi1_budget", budget)
        .param("max_n", guard);
    let out = resolve(out, &format!("verify_nu_q{}_{}.csv", g.q, g.subgroup.replace(',', "-")));
    manifest.paths.insert("out".into(), path_string(&out));
    csv_doc(&manifest, out, &body)?;
    Ok(all_pass)
}

fn poset_report(p: &GenPoset, through: usize) -> Result<(Value, HomologyResult), Failure> {
    let h = p.reduced_homology(through)?;
    let comps = p.components();
    let acyclic_components = comps
        .iter()
        .map(|c| c.reduced_homology(through).map(|h| h.vanishes()))
        .collect::<Result<Vec<_>, _>>()?;
    let v = json!({
        "poset": p.to_json(),
        "objects": p.len(),
        "arrows": p.arrow_count(),
        "components": comps.len(),
        "acyclic_components": acyclic_components.iter().filter(|&&a| a).count(),
        "reduced_homology": homology_json(&h),
    });
    Ok((v, h))
}

#[allow(clippy::too_many_arguments)]
fn cmd_desclink(
    seed: u64,
    g: &GroupFlags,
    n: usize,
    star: bool,
    full: bool,
    cap: usize,
    out: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> CmdResult {
    let config = config(g)?;
    let full = full || !star;
    let through = n.max(1);
    let mut result = serde_json::Map::new();
    let mut rows: Vec<(String, HomologyResult)> = Vec::new();
    if full {
        let link = enumerate_desc_link(&config, n, cap)?;
        let (v, h) = poset_report(&link.poset, through)?;
        result.insert("full".into(), v);
        rows.push(("full".into(), h));
    }
    if star {
        let (link, _) = enumerate_desc_link_star(&config, n, cap)?;
        let (v, h) = poset_report(&link.poset, through)?;
        result.insert("star".into(), v);
        rows.push(("star".into(), h));
    }
    let mut pass = true;
    if rows.len() == 2 {
        let equal = rows[0].1 == rows[1].1;
        result.insert("homology_equal".into(), Value::Bool(equal));
        pass = equal;
    }
    let tag = format!("desclink_q{}_{}_r{}_n{n}", g.q, g.subgroup.replace(',', "-"), g.r);
    let json_out = resolve(out, &format!("{tag}.json"));
    let csv_out = match csv {
        Some(p) => Some(p.clone()),
        None => json_out.as_ref().map(|p| p.with_extension("csv")),
    };
    let mut manifest = RunManifest::new("desclink", seed)
        .group(g, &config)
        .param("n", n)
        .param("star", star)
        .param("full", full)
        .param("cap", cap);
    manifest.paths.insert("csv".into(), path_string(&csv_out));
    let table: Vec<BettiRow<'_>> = rows.iter().map(|(name, h)| BettiRow { instance: name, homology: h }).collect();
    let body = betti_csv(&table);
    if let Some(p) = csv_out.clone() {
        let mut m = RunManifest::new("desclink", seed);
        m.params = manifest.params.clone();
        m.paths.insert("out".into(), path_string(&csv_out));
        csv_doc(&m, Some(p), &body)?;
    }
    json_doc(manifest, json_out, Value::Object(result))?;
    Ok(pass)
}

fn cmd_group(seed: u64, op: &GroupOp) -> CmdResult {
    let (manifest, out, result) = match op {
        GroupOp::Compose { a, b, out } => {
            let g = element(a)?.compose(&element(b)?)?.canonical_form();
            (RunManifest::new("group compose", seed).param("a", a).param("b", b), out, to_value(&g))
        }
        GroupOp::Inverse { a, out } => {
            let g = element(a)?.inverse().canonical_form();
            (RunManifest::new("group inverse", seed).param("a", a), out, to_value(&g))
        }
        GroupOp::Canon { a, out } => {
            let g = element(a)?.canonical_form();
            (RunManifest::new("group canon", seed).param("a", a), out, to_value(&g))
        }
        GroupOp::Stab { gamma, phi, out } => {
            let s = stabilizer_test(&element(gamma)?, &element(phi)?)?;
            (
                RunManifest::new("group stab", seed).param("gamma", gamma).param("phi", phi),
                out,
                json!({ "stabilizes": s }),
            )
        }
        GroupOp::Subnormal { phi, k, out } => {
            let kp = subnormal_depth(&element(phi)?, *k)?;
            (RunManifest::new("group subnormal", seed).param("phi", phi).param("k", k), out, json!({ "kprime": kp }))
        }
        GroupOp::Random { group, depth, out } => {
            let config = config(group)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_element(&mut rng, config.clone(), *depth)?.canonical_form();
            (RunManifest::new("group random", seed).group(group, &config).param("depth", depth), out, to_value(&g))
        }
    };
    json_doc(manifest, out.clone(), result)?;
    Ok(true)
}

fn to_value(g: &LocalSimilarity) -> Value {
    serde_json::to_value(to_json(g)).expect("element serializes")
}

fn cmd_trade(seed: u64, schedule: &Path, prefix: Option<usize>, out: &Option<PathBuf>) -> CmdResult {
    let text = fs::read_to_string(schedule).map_err(|e| Failure::usage(format!("{}: {e}", schedule.display())))?;
    let s = FiltrationSchedule::parse(&text)?;
    let sp = sparsify(&s)?;
    let len = prefix.unwrap_or(sp.schedule.len());
    if len == 0 || len > sp.schedule.len() {
        return Err(Failure::new(
            4,
            format!("prefix {len} outside 1..={} of the sparsified schedule", sp.schedule.len()),
        ));
    }
    let run = run_staircase(&sp.schedule, len)?;
    let before = euler_characteristic(&run.input);
    let after = euler_characteristic(&run.output);
    let replay_ok = run.log.replay(&run.input)? == run.output;
    let pass = before == after && replay_ok;
    let result = json!({
        "selected": sp.selected,
        "sparsified": sp.schedule.to_json(),
        "input": run.input.to_cells(),
        "final": run.output.to_cells(),
        "log": run.log,
        "stable_counts": run.stable,
        "euler_before": before,
        "euler_after": after,
        "replay_ok": replay_ok,
    });
    let stem = schedule.file_stem().map_or_else(|| "schedule".into(), |s| s.to_string_lossy().to_string());
    let mut manifest = RunManifest::new("trade", seed).param("prefix", len);
    manifest.paths.insert("schedule".into(), schedule.display().to_string());
    json_doc(manifest, resolve(out, &format!("trade_{stem}.json")), result)?;
    eprintln!("{} trades, chi {} -> {}", run.log.events.len(), before.total, after.total);
    Ok(pass)
}

fn cmd_count_cells(seed: u64, g: &GroupFlags, k: usize, d: usize, cap: usize, out: &Option<PathBuf>) -> CmdResult {
    let config = config(g)?;
    let count = count_equivariant_cells(&config, k, d, cap)?;
    let manifest = RunManifest::new("count-cells", seed)
        .group(g, &config)
        .param("k", k)
        .param("d", d)
        .param("cap", cap);
    let tag = format!("cells_q{}_{}_r{}_k{k}_d{d}.json", g.q, g.subgroup.replace(',', "-"), g.r);
    json_doc(manifest, resolve(out, &tag), json!({ "count": count }))?;
    Ok(true)
}

fn run(cli: &Cli) -> CmdResult {
    let seed = cli.seed;
    match &cli.command {
        Command::BuildCn { group, n, format, out } => cmd_build_cn(seed, group, *n, *format, out),
        Command::VerifyNu { group, nmax, pi1_budget, max_n, out } => {
            cmd_verify_nu(seed, group, *nmax, *pi1_budget, *max_n, out)
        }
        Command::Desclink { group, n, star, full, cap, out, csv } => {
            cmd_desclink(seed, group, *n, *star, *full, *cap, out, csv)
        }
        Command::Group { op } => cmd_group(seed, op),
        Command::Trade { schedule, prefix, out } => cmd_trade(seed, schedule, *prefix, out),
        Command::CountCells { group, k, d, cap, out } => cmd_count_cells(seed, group, *k, *d, *cap, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
