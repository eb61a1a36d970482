//! Command-line front end: classification reports, blow-up scripts, cusp
//! construction, and the monomial-map checks, over the graph JSON schema.
//!
//! Exit codes: 0 success, 2 parse error, 3 not negative definite, 4 bad
//! blow-up script step, 5 rejected cusp multiplier (not totally positive /
//! not stabilizing), 1 anything else.

use clap::{Parser, Subcommand};
use singgraph::arith::{format_rat, parse_rat, QuadElem, Rat};
use singgraph::blowup::{apply_script, BlowupStep};
use singgraph::cusp::{
    cusp_dual_graph, klein_polygon_with_cap, rotation_number, topological_degree, CuspError,
    QuadLattice,
};
use singgraph::endo::{
    dichotomy_case, jacobian_divisor, skew_degrees, verify_jacobian_formula, DichotomyCase,
    MonoVal, MonomialMap,
};
use singgraph::graph::{
    classify_with_cap, cyclic_quotient_graph, minimality_warnings, DualGraph, ExceptionalData,
    GraphError, DEFAULT_ITER_CAP,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "singgraph",
    version,
    about = "Combinatorial invariants of normal surface singularities from weighted dual graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the singularity of a dual graph file: discrepancies,
    /// multiplicities, thinness, klt/lc verdict
    Classify {
        /// Graph JSON file
        graph: PathBuf,
        /// Emit a DOT rendering instead of the table
        #[arg(long)]
        dot: bool,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
        /// Only print the verdict lines
        #[arg(long)]
        quiet: bool,
    },
    /// Apply a blow-up script and emit the rewritten graph
    Blowup {
        graph: PathBuf,
        /// JSON list of steps: {"op":"free","at":"v"} or
        /// {"op":"satellite","at":["a","b"]}
        script: PathBuf,
        /// Write the resulting graph here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress the transport diff report
        #[arg(long)]
        quiet: bool,
    },
    /// Build the cusp singularity of a real quadratic lattice and analyze
    /// an endomorphism
    Cusp {
        /// Square-free field discriminant
        #[arg(long)]
        d: u64,
        /// Lattice basis: "sqrt" for Z[sqrt d], "half" for the ring of
        /// integers at d = 1 (mod 4), or an explicit element "p+qw"
        #[arg(long, default_value = "sqrt")]
        omega: String,
        /// Totally positive multiplier "p+qw" to analyze
        #[arg(long)]
        alpha: Option<String>,
        /// Emit the cusp data as JSON
        #[arg(long)]
        json: bool,
        /// Also emit the dual graph JSON of the cusp cycle
        #[arg(long)]
        graph: bool,
    },
    /// Hirzebruch-Jung chain of the cyclic quotient singularity (n, q)
    Cyclic {
        n: u64,
        q: u64,
        /// Emit DOT instead of graph JSON
        #[arg(long)]
        dot: bool,
    },
    /// Check the thinness identity A(F_* v) = A(v) + v(JF) for a monomial
    /// map and a weight pair
    VerifyJacobian {
        /// Exponents a,b,c,d of (x^a y^b, x^c y^d)
        #[arg(long)]
        map: String,
        /// Weights s,t (rationals such as 3/2)
        #[arg(long)]
        weights: String,
    },
    /// Finite-self-map dichotomy report for a cyclic-equivariant monomial
    /// map
    Theoremb {
        /// Cyclic quotient type n,q
        #[arg(long)]
        group: String,
        /// Exponents a,b,c,d
        #[arg(long)]
        map: String,
    },
    /// Degrees of a fibration-preserving map from fiber and base degrees
    Skew {
        #[arg(long)]
        fiber: u64,
        #[arg(long)]
        base: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn iter_cap() -> usize {
    std::env::var("SINGGRAPH_ITER_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ITER_CAP)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify {
            graph,
            dot,
            json,
            quiet,
        } => cmd_classify(&graph, dot, json, quiet),
        Command::Blowup {
            graph,
            script,
            out,
            quiet,
        } => cmd_blowup(&graph, &script, out, quiet),
        Command::Cusp {
            d,
            omega,
            alpha,
            json,
            graph,
        } => cmd_cusp(d, &omega, alpha, json, graph),
        Command::Cyclic { n, q, dot } => cmd_cyclic(n, q, dot),
        Command::VerifyJacobian { map, weights } => cmd_verify_jacobian(&map, &weights),
        Command::Theoremb { group, map } => cmd_theoremb(&group, &map),
        Command::Skew { fiber, base } => cmd_skew(fiber, base),
    }
}

fn read_graph(path: &PathBuf) -> Result<DualGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    DualGraph::from_json(&text).map_err(|e| Failure::new(2, e.to_string()))
}

fn graph_failure(e: GraphError) -> Failure {
    match &e {
        GraphError::NotNegativeDefinite { .. } => Failure::new(3, e.to_string()),
        GraphError::Parse(_) => Failure::new(2, e.to_string()),
        _ => Failure::new(1, e.to_string()),
    }
}

fn cusp_failure(e: CuspError) -> Failure {
    match &e {
        CuspError::NotTotallyPositive | CuspError::NotStabilizing => Failure::new(5, e.to_string()),
        CuspError::Arith(_) | CuspError::UnsupportedBasis(_) => Failure::new(2, e.to_string()),
        _ => Failure::new(1, e.to_string()),
    }
}

fn cmd_classify(path: &PathBuf, dot: bool, json: bool, quiet: bool) -> Result<(), Failure> {
    let g = read_graph(path)?;
    let classification = classify_with_cap(&g, iter_cap()).map_err(graph_failure)?;
    let data = ExceptionalData::compute(&g).map_err(graph_failure)?;
    for w in minimality_warnings(&g) {
        eprintln!("warning: {w}");
    }
    if dot {
        print!("{}", g.to_dot(Some(&data)));
        return Ok(());
    }
    if json {
        let vertices: Vec<serde_json::Value> = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                serde_json::json!({
                    "id": v.id,
                    "self_intersection": v.self_intersection,
                    "genus": v.genus,
                    "loops": v.loops,
                    "b": data.multiplicities[i].to_string(),
                    "a": format_rat(&data.discrepancies[i]),
                    "A": format_rat(&data.thinness[i]),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "vertices": vertices,
            "verdict": classification.verdict.to_string(),
            "min_thinness": format_rat(&classification.min_thinness),
            "lc_places": classification.lc_places.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        return Ok(());
    }
    if !quiet {
        println!(
            "{:<10} {:>6} {:>6} {:>6} {:>6} {:>10} {:>10}",
            "vertex", "self", "genus", "loops", "b", "a", "A"
        );
        for (i, v) in g.vertices().iter().enumerate() {
            println!(
                "{:<10} {:>6} {:>6} {:>6} {:>6} {:>10} {:>10}",
                v.id,
                v.self_intersection,
                v.genus,
                v.loops,
                data.multiplicities[i].to_string(),
                format_rat(&data.discrepancies[i]),
                format_rat(&data.thinness[i]),
            );
        }
    }
    println!(
        "{}, min A = {}",
        classification.verdict,
        format_rat(&classification.min_thinness)
    );
    println!("A = 0 locus: {}", classification.lc_places);
    Ok(())
}

fn cmd_blowup(
    graph: &PathBuf,
    script: &PathBuf,
    out: Option<PathBuf>,
    quiet: bool,
) -> Result<(), Failure> {
    let g = read_graph(graph)?;
    let text = std::fs::read_to_string(script)
        .map_err(|e| Failure::new(2, format!("{}: {e}", script.display())))?;
    let steps: Vec<BlowupStep> =
        serde_json::from_str(&text).map_err(|e| Failure::new(2, format!("script: {e}")))?;
    let (result, reports) = apply_script(&g, &steps).map_err(|e| Failure::new(4, e.to_string()))?;
    if !quiet {
        let mut clean = true;
        for (i, r) in reports.iter().enumerate() {
            for line in &r.diff {
                eprintln!("step {i}: transport mismatch: {line}");
                clean = false;
            }
            for line in &r.multiplicity_notes {
                eprintln!("step {i}: note: {line}");
            }
        }
        if clean {
            eprintln!("transport diff: (empty)");
        }
    }
    let json = result.to_json();
    match out {
        Some(path) => std::fs::write(&path, json + "\n")
            .map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_cusp(
    d: u64,
    omega: &str,
    alpha: Option<String>,
    json: bool,
    graph: bool,
) -> Result<(), Failure> {
    let lattice = match omega {
        "sqrt" => QuadLattice::zd(d),
        "half" => QuadLattice::ring_of_integers(d),
        expr => {
            let om = QuadElem::parse(expr, d).map_err(|e| Failure::new(2, e.to_string()))?;
            QuadLattice::new(d, om)
        }
    }
    .map_err(cusp_failure)?;
    let data = klein_polygon_with_cap(&lattice, iter_cap() as u64).map_err(cusp_failure)?;
    if json {
        let doc = serde_json::json!({
            "d": d,
            "omega": lattice.omega().to_string(),
            "epsilon": data.epsilon.to_string(),
            "period": data.period,
            "cycle": data.cycle_selfint,
            "extremal": data
                .extremal_points
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!("lattice: Z + Z({}) in Q(sqrt {d})", lattice.omega());
        println!("epsilon: {}", data.epsilon);
        println!("period: {}", data.period);
        println!(
            "cycle self-intersections: [{}]",
            data.cycle_selfint
                .iter()
                .map(|c| format!("-{c}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    if graph {
        println!("{}", cusp_dual_graph(&data).to_json());
    }
    if let Some(alpha) = alpha {
        let alpha = QuadElem::parse(&alpha, d).map_err(|e| Failure::new(2, e.to_string()))?;
        let degree = topological_degree(&lattice, &alpha).map_err(cusp_failure)?;
        let rotation = rotation_number(&lattice, &alpha).map_err(cusp_failure)?;
        println!("alpha: {alpha}");
        println!("topological degree: {degree}");
        println!("rotation number: {}", rotation.description);
        println!("note: a finite self-map of a cusp is unramified (empty Jacobian divisor)");
    }
    Ok(())
}

fn cmd_cyclic(n: u64, q: u64, dot: bool) -> Result<(), Failure> {
    let g = cyclic_quotient_graph(n, q).map_err(|e| Failure::new(2, e.to_string()))?;
    if dot {
        let data = ExceptionalData::compute(&g).map_err(graph_failure)?;
        print!("{}", g.to_dot(Some(&data)));
    } else {
        println!("{}", g.to_json());
    }
    Ok(())
}

fn parse_exponents(map: &str) -> Result<[[u64; 2]; 2], Failure> {
    let parts: Vec<u64> = map
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::new(2, format!("--map: {e}")))?;
    if parts.len() != 4 {
        return Err(Failure::new(2, "--map needs four exponents a,b,c,d"));
    }
    Ok([[parts[0], parts[1]], [parts[2], parts[3]]])
}

fn cmd_verify_jacobian(map: &str, weights: &str) -> Result<(), Failure> {
    let exps = parse_exponents(map)?;
    let f = MonomialMap::new(exps).map_err(|e| Failure::new(1, e.to_string()))?;
    let ws: Vec<Rat> = weights
        .split(',')
        .map(|p| parse_rat(p.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::new(2, format!("--weights: {e}")))?;
    if ws.len() != 2 {
        return Err(Failure::new(2, "--weights needs two rationals s,t"));
    }
    let v =
        MonoVal::new(ws[0].clone(), ws[1].clone()).map_err(|e| Failure::new(1, e.to_string()))?;
    let jf = jacobian_divisor(&f);
    let check = verify_jacobian_formula(&f, &v);
    println!(
        "F(x, y) = (x^{} y^{}, x^{} y^{}), topological degree {}",
        exps[0][0],
        exps[0][1],
        exps[1][0],
        exps[1][1],
        f.topological_degree()
    );
    println!(
        "JF = {} x^{} y^{}",
        jf.coefficient, jf.x_exponent, jf.y_exponent
    );
    println!(
        "A(F_* v) = {}   A(v) + v(JF) = {}   equal: {}",
        format_rat(&check.lhs),
        format_rat(&check.rhs),
        check.equal
    );
    if check.equal {
        Ok(())
    } else {
        Err(Failure::new(1, "Jacobian identity failed"))
    }
}

fn cmd_theoremb(group: &str, map: &str) -> Result<(), Failure> {
    let parts: Vec<u64> = group
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::new(2, format!("--group: {e}")))?;
    if parts.len() != 2 {
        return Err(Failure::new(2, "--group needs n,q"));
    }
    let exps = parse_exponents(map)?;
    let f = MonomialMap::with_group(exps, parts[0], parts[1])
        .map_err(|e| Failure::new(1, e.to_string()))?;
    let report = dichotomy_case(&f).map_err(|e| Failure::new(1, e.to_string()))?;
    println!(
        "quotient type ({}, {}), topological degree {}",
        report.group.0, report.group.1, report.topological_degree
    );
    println!(
        "JF = {} x^{} y^{} ({})",
        report.jacobian.coefficient,
        report.jacobian.x_exponent,
        report.jacobian.y_exponent,
        if report.jacobian.is_empty() {
            "empty"
        } else {
            "nonempty"
        }
    );
    match report.case {
        DichotomyCase::Invertible => {
            println!("degree 1: invertible germ, no dichotomy applies");
        }
        DichotomyCase::KltConfirmed { quotient_verdict } => {
            println!(
                "ramified finite self-map: quotient must be klt; independent classification of the ({}, {}) chain: {}",
                report.group.0, report.group.1, quotient_verdict
            );
        }
    }
    Ok(())
}

fn cmd_skew(fiber: u64, base: u64) -> Result<(), Failure> {
    let (e, lambda) = skew_degrees(fiber, base).map_err(|e| Failure::new(2, e.to_string()))?;
    println!("e = {e}");
    println!("lambda = {lambda}");
    Ok(())
}
