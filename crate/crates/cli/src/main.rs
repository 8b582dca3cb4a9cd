//! Batch front end: builds block moment graphs, runs the sheaf
//! construction, prints multiplicity tables and verification reports.
//! Data goes to stdout (or a file), progress and errors to stderr.
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use clap::{Args, Parser, Subcommand};
use momentsheaf::bmp::{bmp, multiplicity_table, DegreeBoundPolicy};
use momentsheaf::coxeter::{build_root_system, CartanType, Weight};
use momentsheaf::hecke::kl_table;
use momentsheaf::momentgraph::{build_block_graph, MomentGraph, OrderDirection};
use momentsheaf::polyalg::Q;
use momentsheaf::verify::{report_json, run_suite, Suite};
use num_bigint::BigInt;
use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "momentsheaf", version, about = "Exact sheaves on block moment graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Cartan type: A, B, C, D or G2
    #[arg(long = "type", value_name = "TYPE")]
    cartan_type: String,
    /// Rank of the root system
    #[arg(long)]
    rank: usize,
    /// Weight in fundamental coordinates, comma-separated exact
    /// rationals; defaults to the regular antidominant point -2,...,-2
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// Fixed per-vertex degree bound override
    #[arg(long)]
    bound: Option<i64>,
    /// Saturation window in degrees
    #[arg(long, default_value_t = 4)]
    window: i64,
    /// Skip the Kazhdan-Lusztig rank cross-check
    #[arg(long)]
    no_oracle: bool,
}

impl PolicyArgs {
    fn policy(&self) -> DegreeBoundPolicy {
        DegreeBoundPolicy {
            fixed_bound: self.bound,
            saturation_window: self.window,
            oracle_crosscheck: !self.no_oracle,
            alt_linear_extension: false,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit the block moment graph
    Graph {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output format: text, json or dot
        #[arg(long, default_value = "text")]
        format: String,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the sheaf construction from one base vertex (or all)
    Bmp {
        #[command(flatten)]
        graph: GraphArgs,
        /// Order direction: up or down
        #[arg(long, default_value = "up")]
        dir: String,
        /// Base vertex name ("e", "s1s2", ...) or "all"
        #[arg(long, default_value = "e")]
        base: String,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Output format: text or json
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the full multiplicity table of a block
    MultTable {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "down")]
        dir: String,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Output format: text, json or csv
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a verification suite and report pass/fail per check
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        /// Suite name: all, gkm, kl-bmp, pullback, structure-algebra,
        /// adjunction, projectivity, verma, duality, hom, negative
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Output format: text or json
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<String>,
    },
}

fn parse_lambda(s: &str, rank: usize) -> Result<Weight, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != rank {
        return Err(format!("lambda needs {rank} coordinates, got {}", parts.len()));
    }
    let mut coords = Vec::with_capacity(rank);
    for p in parts {
        let c = Q::from_str(p.trim()).map_err(|e| format!("bad coordinate '{p}': {e}"))?;
        coords.push(c);
    }
    Ok(Weight::new(coords))
}

fn build_graph(args: &GraphArgs) -> Result<Arc<MomentGraph>, String> {
    let ty = CartanType::parse(&args.cartan_type)
        .ok_or_else(|| format!("unsupported Cartan type '{}'", args.cartan_type))?;
    let rs = build_root_system(ty, args.rank).map_err(|e| e.to_string())?;
    let lambda = match &args.lambda {
        Some(s) => parse_lambda(s, args.rank)?,
        None => Weight::new(vec![Q::from_integer(BigInt::from(-2)); args.rank]),
    };
    let graph = build_block_graph(&rs, &lambda).map_err(|e| e.to_string())?;
    Ok(Arc::new(graph))
}

fn emit(out: &Option<String>, data: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, data).map_err(|e| format!("write {path}: {e}")),
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(data.as_bytes())
                .and_then(|_| {
                    if !data.ends_with('\n') {
                        stdout.write_all(b"\n")
                    } else {
                        Ok(())
                    }
                })
                .map_err(|e| format!("stdout: {e}"))
        }
    }
}

fn parse_dir(s: &str) -> Result<OrderDirection, String> {
    match s {
        "up" => Ok(OrderDirection::Up),
        "down" => Ok(OrderDirection::Down),
        other => Err(format!("direction must be 'up' or 'down', got '{other}'")),
    }
}

fn graph_text(graph: &MomentGraph) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "vertices: {}  edges: {}  components: {}\n",
        graph.len(),
        graph.edges.len(),
        graph.connected_components()
    ));
    for v in 0..graph.len() {
        s.push_str(&format!("  {} (length {})\n", graph.names[v], graph.lengths[v]));
    }
    for e in &graph.edges {
        s.push_str(&format!(
            "  {} -- {}  label {}\n",
            graph.names[e.x],
            graph.names[e.y],
            e.label.to_polynomial().render(&graph.ring)
        ));
    }
    s
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Graph { graph, format, out } => {
            let g = build_graph(&graph)?;
            let data = match format.as_str() {
                "text" => graph_text(&g),
                "json" => serde_json::to_string_pretty(&g.to_json()).unwrap(),
                "dot" => g.to_dot(),
                other => return Err(format!("unknown format '{other}'")),
            };
            emit(&out, &data)?;
            Ok(true)
        }
        Command::Bmp { graph, dir, base, policy, format, out } => {
            let g = build_graph(&graph)?;
            let dir = parse_dir(&dir)?;
            let pol = policy.policy();
            let table = g.block.as_ref().map(|b| kl_table(&b.group));
            let bases: Vec<usize> = if base == "all" {
                (0..g.len()).collect()
            } else {
                vec![g
                    .vertex_by_name(&base)
                    .ok_or_else(|| format!("unknown vertex '{base}'"))?]
            };
            let mut ok = true;
            let mut docs = Vec::new();
            let mut text = String::new();
            for b in bases {
                eprintln!("bmp {} from {}", dir.as_str(), g.names[b]);
                let r = bmp(&g, dir, b, &pol, table.as_ref()).map_err(|e| e.to_string())?;
                ok &= r.saturated() && r.oracle_ok();
                text.push_str(&format!(
                    "base {} ({}): saturated={} oracle_ok={}\n",
                    g.names[b],
                    dir.as_str(),
                    r.saturated(),
                    r.oracle_ok()
                ));
                for v in 0..g.len() {
                    if !r.sheaf.stalks[v].is_zero() {
                        text.push_str(&format!(
                            "  {}: {:?}\n",
                            g.names[v],
                            r.sheaf.stalks[v].shifts()
                        ));
                    }
                }
                docs.push(serde_json::json!({
                    "base": g.names[b],
                    "direction": dir.as_str(),
                    "saturated": r.saturated(),
                    "oracle_ok": r.oracle_ok(),
                    "unsaturated_vertices": r.diagnostics.unsaturated,
                    "oracle_mismatches": r.diagnostics.oracle_mismatches,
                    "generator_degrees": r.diagnostics.generator_degrees,
                    "sheaf": r.sheaf.to_json(),
                }));
            }
            let data = match format.as_str() {
                "text" => text,
                "json" => serde_json::to_string_pretty(
                    &serde_json::json!({"schema_version": 1, "results": docs}),
                )
                .unwrap(),
                other => return Err(format!("unknown format '{other}'")),
            };
            emit(&out, &data)?;
            Ok(ok)
        }
        Command::MultTable { graph, dir, policy, format, out } => {
            let g = build_graph(&graph)?;
            let dir = parse_dir(&dir)?;
            let pol = policy.policy();
            let table = g.block.as_ref().map(|b| kl_table(&b.group));
            let t = multiplicity_table(&g, dir, &pol, table.as_ref()).map_err(|e| e.to_string())?;
            let data = match format.as_str() {
                "text" => {
                    let mut s = String::new();
                    for w in 0..g.len() {
                        for x in 0..g.len() {
                            let (rank, _) = &t.entries[w][x];
                            if *rank > 0 {
                                s.push_str(&format!(
                                    "({}, {}): {}  graded {}\n",
                                    t.names[w],
                                    t.names[x],
                                    rank,
                                    t.rank_poly(w, x).render()
                                ));
                            }
                        }
                    }
                    s
                }
                "csv" => {
                    let mut s = String::from("base");
                    for name in &t.names {
                        s.push_str(&format!(",{name}"));
                    }
                    s.push('\n');
                    for w in 0..g.len() {
                        s.push_str(&t.names[w]);
                        for x in 0..g.len() {
                            s.push_str(&format!(",{}", t.entries[w][x].0));
                        }
                        s.push('\n');
                    }
                    s
                }
                "json" => serde_json::to_string_pretty(&serde_json::json!({
                    "schema_version": 1,
                    "direction": dir.as_str(),
                    "names": t.names,
                    "entries": t.entries.iter().map(|row| {
                        row.iter().map(|(rank, shifts)| serde_json::json!({
                            "rank": rank,
                            "shifts": shifts,
                        })).collect::<Vec<_>>()
                    }).collect::<Vec<_>>(),
                }))
                .unwrap(),
                other => return Err(format!("unknown format '{other}'")),
            };
            emit(&out, &data)?;
            Ok(t.all_saturated && t.all_oracle_ok)
        }
        Command::Verify { graph, suite, policy, format, out } => {
            let g = build_graph(&graph)?;
            let suite = Suite::parse(&suite).ok_or_else(|| format!("unknown suite '{suite}'"))?;
            let pol = policy.policy();
            eprintln!("verify suite {} on {} vertices", suite.as_str(), g.len());
            let outcomes = run_suite(&g, suite, &pol)?;
            let passed = outcomes.iter().all(|o| o.passed);
            let data = match format.as_str() {
                "text" => {
                    let mut s = String::new();
                    for o in &outcomes {
                        s.push_str(&format!(
                            "{}: {}\n",
                            o.name,
                            if o.passed { "pass" } else { "FAIL" }
                        ));
                        if !o.passed {
                            s.push_str(&format!("  {}\n", o.details));
                        }
                    }
                    s
                }
                "json" => serde_json::to_string_pretty(&report_json(&outcomes)).unwrap(),
                other => return Err(format!("unknown format '{other}'")),
            };
            emit(&out, &data)?;
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
