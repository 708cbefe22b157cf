//! pisotile: beta-numeration for quadratic Pisot numbers from the command
//! line. Every subcommand takes the minimal polynomial X^2 - A*X - B via
//! `--poly A B`; outputs are deterministic text, CSV, DOT, or JSON.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pisotile::error::Error;
use pisotile::gamma::{
    default_tol, gamma, gamma_scan_range, GammaValue, GammaWitness, ScanResult, Situation,
};
use pisotile::graphs::{boundary_graph, AdmGraph};
use pisotile::numeration::{
    density_report, expand_with_cap, is_purely_periodic_with_cap, satisfies_f, Splitting,
    DEFAULT_ORBIT_CAP,
};
use pisotile::qfield::PisotQuad;
use pisotile::text::{
    format_basis_form, format_digit_word, format_rational, format_sig, format_sqrt_form,
    parse_rational,
};
use pisotile::tiles::{default_prime, hensel_root, tile_points_with_prefix, write_csv, TilePoint};
use pisotile::Rational;

#[derive(Parser)]
#[command(name = "pisotile", version, about = "Beta-numeration for quadratic Pisot numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Poly {
    /// Coefficients a b of the minimal polynomial X^2 - aX - b.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    poly: Vec<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Context report: Pisot check, norm, Parry data, density conditions.
    Info {
        #[command(flatten)]
        poly: Poly,
    },
    /// Greedy beta-expansion of a non-negative rational.
    Expand {
        #[command(flatten)]
        poly: Poly,
        /// The number to expand, as P/Q or an integer.
        #[arg(long)]
        x: String,
        /// Orbit iteration cap.
        #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
        max: usize,
    },
    /// Pure-periodicity test for a rational in [0, 1).
    Periodic {
        #[command(flatten)]
        poly: Poly,
        #[arg(long)]
        x: String,
    },
    /// The admissibility automaton, optionally as DOT and/or JSON files.
    AdmGraph {
        #[command(flatten)]
        poly: Poly,
        #[arg(long)]
        dot: Option<String>,
        #[arg(long)]
        json: Option<String>,
    },
    /// The boundary graph of tile intersections.
    BoundaryGraph {
        #[command(flatten)]
        poly: Poly,
        #[arg(long)]
        dot: Option<String>,
        #[arg(long)]
        json: Option<String>,
    },
    /// The pure-periodicity threshold gamma(beta), exact.
    Gamma {
        #[command(flatten)]
        poly: Poly,
        /// Enclosure tolerance as a rational P/Q (default 1/2^40).
        #[arg(long)]
        tol: Option<String>,
        /// Skip the scan-oracle cross-check.
        #[arg(long)]
        no_scan: bool,
    },
    /// Exhaustive pure-periodicity scan over small-denominator rationals.
    Scan {
        #[command(flatten)]
        poly: Poly,
        #[arg(long)]
        qmax: u32,
        /// Upper end of the scanned interval, as P/Q.
        #[arg(long)]
        upper: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Tile point cloud as CSV: conjugate and Monna coordinates per word.
    Tile {
        #[command(flatten)]
        poly: Poly,
        #[arg(long)]
        depth: usize,
        /// p-adic precision exponent k (coordinates mod p^k).
        #[arg(long)]
        padic_prec: u32,
        /// Prime over beta; defaults to the smallest prime dividing |N(beta)|.
        #[arg(long)]
        prime: Option<u64>,
        /// Emit the x-tile for this shift instead of the central tile.
        #[arg(long)]
        x_shift: Option<String>,
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e {
            Error::Parse(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            Error::Io(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
            other => {
                eprintln!("ERR {}: {}", other.code(), other);
                ExitCode::from(3)
            }
        },
    }
}

fn log_enabled(level: &str) -> bool {
    match std::env::var("PISOTILE_LOG").as_deref() {
        Ok("debug") => true,
        Ok("info") => level == "info",
        _ => false,
    }
}

macro_rules! info {
    ($($arg:tt)*) => {
        if log_enabled("info") {
            eprintln!($($arg)*);
        }
    };
}

fn context(poly: &Poly) -> Result<PisotQuad, Error> {
    if poly.poly.len() != 2 {
        return Err(Error::Parse("--poly needs exactly two integers".into()));
    }
    PisotQuad::new(poly.poly[0], poly.poly[1])
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Info { poly } => {
            let ctx = context(&poly)?;
            print_info(&ctx);
            Ok(())
        }
        Command::Expand { poly, x, max } => {
            let ctx = context(&poly)?;
            let r = parse_rational(&x)?;
            let e = expand_with_cap(&ctx.from_rational(&r), &ctx, max)?;
            println!("x = {}", format_rational(&r));
            println!("integer: {}", word_or_dash(&e.integer));
            println!("preperiod: {}", word_or_dash(&e.preperiod));
            println!("period: {}", word_or_dash(&e.period));
            println!("finite: {}", yes_no(e.is_finite()));
            println!("purely periodic: {}", yes_no(e.is_purely_periodic()));
            Ok(())
        }
        Command::Periodic { poly, x } => {
            let ctx = context(&poly)?;
            let r = parse_rational(&x)?;
            let (pp, period) = is_purely_periodic_with_cap(
                &ctx.from_rational(&r),
                &ctx,
                DEFAULT_ORBIT_CAP,
            )?;
            if pp {
                println!("purely periodic: yes");
                println!("period: {}", period.unwrap_or(0));
            } else {
                println!("purely periodic: no");
            }
            Ok(())
        }
        Command::AdmGraph { poly, dot, json } => {
            let ctx = context(&poly)?;
            let g = AdmGraph::new(&ctx);
            println!("nodes: {}", g.n);
            println!("edges: {}", g.edges().len());
            println!("t: {}", format_digit_word(&g.t));
            println!("m: {}", g.m);
            if let Some(path) = dot {
                fs::write(&path, g.to_dot())?;
                info!("wrote {path}");
            }
            if let Some(path) = json {
                fs::write(&path, g.to_json())?;
                info!("wrote {path}");
            }
            Ok(())
        }
        Command::BoundaryGraph { poly, dot, json } => {
            let ctx = context(&poly)?;
            let g = boundary_graph(&ctx)?;
            let starts = g.start_nodes(&ctx);
            println!("nodes: {}", g.nodes.len());
            println!("edges: {}", g.edges.len());
            println!("start nodes: {}", starts.len());
            println!("reachable from starts: {}", g.reachable(&starts).len());
            for &i in &starts {
                println!("start {}", g.nodes[i].render());
            }
            if let Some(path) = dot {
                fs::write(&path, g.to_dot())?;
                info!("wrote {path}");
            }
            if let Some(path) = json {
                fs::write(&path, g.to_json())?;
                info!("wrote {path}");
            }
            Ok(())
        }
        Command::Gamma { poly, tol, no_scan } => {
            let ctx = context(&poly)?;
            let tol = match tol {
                Some(t) => parse_rational(&t)?,
                None => default_tol(),
            };
            let scan = if no_scan {
                None
            } else {
                Some((50u32, Rational::new(1.into(), 1.into())))
            };
            let result = gamma(&ctx, &tol, scan)?;
            match &result.value {
                GammaValue::Exact(v) => {
                    let basis = format_basis_form(v);
                    let sqrt = format_sqrt_form(v, &ctx);
                    let dec = format_sig(&v.approx(64).0, 12);
                    if basis == sqrt {
                        println!("gamma = {basis} \u{2248} {dec}");
                    } else {
                        println!("gamma = {basis} = {sqrt} \u{2248} {dec}");
                    }
                }
                GammaValue::Enclosure { lo, hi } => {
                    println!(
                        "gamma in [{}, {}] (enclosure)",
                        format_sig(lo, 12),
                        format_sig(hi, 12)
                    );
                }
            }
            println!("situation: {}", situation_name(result.situation));
            match &result.witness {
                Some(GammaWitness::Boundary(node)) => println!("witness: {}", node.render()),
                Some(GammaWitness::Subtile(a)) => println!("witness: subtile {a}"),
                None => println!("witness: -"),
            }
            println!(
                "density conditions: {}",
                if result.density_ok { "exact" } else { "enclosure only" }
            );
            if let Some(scan) = &result.scan {
                print_scan(scan);
            }
            Ok(())
        }
        Command::Scan { poly, qmax, upper, threads } => {
            let ctx = context(&poly)?;
            let upper = parse_rational(&upper)?;
            let scan = run_scan(&ctx, qmax, &upper, threads.max(1))?;
            print_scan(&scan);
            Ok(())
        }
        Command::Tile { poly, depth, padic_prec, prime, x_shift, out, threads } => {
            let ctx = context(&poly)?;
            let p = match prime {
                Some(p) => p,
                None => default_prime(&ctx).ok_or(Error::NotDividingNorm { prime: 0 })?,
            };
            let pc = hensel_root(&ctx, p, padic_prec)?;
            let shift = match &x_shift {
                Some(s) => {
                    let r = parse_rational(s)?;
                    Some(ctx.from_rational(&r))
                }
                None => None,
            };
            let points = run_tile(&ctx, &pc, depth, shift.as_ref(), threads.max(1))?;
            let mut buf = Vec::new();
            write_csv(&points, &mut buf)?;
            fs::write(&out, &buf)?;
            println!("prime: {p}");
            println!("modulus: {}", pc.modulus);
            println!("rows: {}", points.len());
            println!("wrote: {out}");
            Ok(())
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn word_or_dash(w: &[i64]) -> String {
    if w.is_empty() {
        "-".into()
    } else {
        format_digit_word(w)
    }
}

fn situation_name(s: Situation) -> &'static str {
    match s {
        Situation::A => "A",
        Situation::B => "B",
        Situation::C => "C",
        Situation::Full => "Full",
        Situation::Zero => "Zero",
    }
}

fn print_scan(scan: &ScanResult) {
    println!(
        "scan: q <= {}, upper {}, tested {}",
        scan.qmax,
        format_rational(&scan.upper),
        scan.tested
    );
    match &scan.first_failure {
        Some(f) => println!(
            "first failure: {} \u{2248} {}",
            format_rational(f),
            format_sig(f, 12)
        ),
        None => println!("first failure: none"),
    }
    println!("purely periodic below: {}", format_rational(&scan.lower_bracket));
}

fn print_info(ctx: &PisotQuad) {
    let (a, b) = (ctx.a(), ctx.b());
    let term = |coef: i64, var: &str| -> String {
        if coef >= 0 {
            format!(" - {coef}{var}")
        } else {
            format!(" + {}{var}", -coef)
        }
    };
    println!("poly: X^2{}{}", term(a, "*X"), term(b, ""));
    println!("beta = {} \u{2248} {}", format_sqrt_form(&ctx.beta(), ctx), {
        format_sig(&ctx.beta().approx(64).0, 12)
    });
    println!("pisot: yes");
    println!("unit: {}", yes_no(ctx.is_unit()));
    println!("N(beta): {}", ctx.norm_beta());
    println!("field: Q(sqrt({}))", ctx.d());
    println!("field discriminant: {}", ctx.field_disc());
    println!("digit alphabet: 0..{}", ctx.digit_max());
    let parry = ctx.parry();
    match &parry.d_one {
        pisotile::qfield::DOne::Finite(d) => {
            println!("d_beta(1): {} (finite)", format_digit_word(d));
        }
        pisotile::qfield::DOne::Eventually { pre, per } => {
            println!(
                "d_beta(1): {}({})^inf",
                format_digit_word(pre),
                format_digit_word(per)
            );
        }
    }
    println!(
        "d_star(1): {}({})^inf",
        format_digit_word(parry.d_star_pre()),
        format_digit_word(parry.d_star_period())
    );
    println!("parry: m={} n={} t={}", parry.m, parry.n(), format_digit_word(&parry.t));
    println!("property (F): {}", yes_no(satisfies_f(ctx)));
    let density = density_report(ctx);
    println!(
        "density: overall={} b_squarefree={} b_coprime_disc={} qr_odd_primes={} mod8={}",
        yes_no(density.overall),
        yes_no(density.b_squarefree),
        yes_no(density.b_coprime_disc),
        yes_no(density.qr_all_odd_primes),
        yes_no(density.mod8_ok)
    );
    for class in &density.per_prime {
        let name = match class.splitting {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
        };
        println!("prime {}: {} e={} f={}", class.p, name, class.e, class.f);
    }
    for (k, value) in ctx.orbit().iter().enumerate() {
        println!(
            "T^{k}(1) = {} \u{2248} {}",
            format_basis_form(value),
            format_sig(&value.approx(64).0, 12)
        );
    }
    let order: Vec<String> = ctx.orbit_ascending().iter().map(|n| n.to_string()).collect();
    println!("orbit ascending: {}", order.join(","));
}

fn run_scan(
    ctx: &PisotQuad,
    qmax: u32,
    upper: &Rational,
    threads: usize,
) -> Result<ScanResult, Error> {
    let mut tested = 0usize;
    let mut first_failure: Option<Rational> = None;
    if threads <= 1 || qmax < 8 {
        let (t, f) = gamma_scan_range(ctx, 1, qmax, upper)?;
        tested = t;
        first_failure = f;
    } else {
        let chunk = qmax.div_ceil(threads as u32);
        let results = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for i in 0..threads as u32 {
                let lo = 1 + i * chunk;
                let hi = ((i + 1) * chunk).min(qmax);
                if lo > hi {
                    continue;
                }
                handles.push(scope.spawn(move || gamma_scan_range(ctx, lo, hi, upper)));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("scan worker"))
                .collect::<Vec<_>>()
        });
        for r in results {
            let (t, f) = r?;
            tested += t;
            if let Some(f) = f {
                first_failure = Some(match first_failure {
                    None => f,
                    Some(old) => {
                        if f < old {
                            f
                        } else {
                            old
                        }
                    }
                });
            }
        }
        info!("merged {threads} scan chunks");
    }
    let lower_bracket = first_failure.clone().unwrap_or_else(|| upper.clone());
    Ok(ScanResult { qmax, upper: upper.clone(), tested, first_failure, lower_bracket })
}

fn run_tile(
    ctx: &PisotQuad,
    pc: &pisotile::tiles::PadicCtx,
    depth: usize,
    shift: Option<&pisotile::QuadElem>,
    threads: usize,
) -> Result<Vec<TilePoint>, Error> {
    if threads <= 1 || depth == 0 {
        return tile_points_with_prefix(ctx, pc, depth, shift, &[]);
    }
    // partition by first digit; merging in digit order preserves the
    // word-lexicographic output order
    let digits: Vec<i64> = (0..=ctx.digit_max()).collect();
    let results = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in digits.chunks(digits.len().div_ceil(threads)) {
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                for &d in chunk {
                    out.extend(tile_points_with_prefix(ctx, pc, depth, shift, &[d])?);
                }
                Ok::<_, Error>(out)
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("tile worker"))
            .collect::<Vec<_>>()
    });
    let mut points = Vec::new();
    for r in results {
        points.extend(r?);
    }
    info!("merged {threads} tile chunks");
    Ok(points)
}
