//! `fermext`: exact classification and counting runs over pointed spin
//! categories, their group actions, cohomological obstructions, and the
//! catalog of minimal modular extensions.
//!
//! Exit codes: 0 success, 1 mathematical failure (violations found or an
//! expectation flag not met), 2 usage or parse errors.

mod schema;

use clap::{Args, Parser, Subcommand};
use fermext_core::action::{o3_bosonic, o3_fermionic, theta_class, FermO3};
use fermext_core::cohomology::{cohomology, qz_cohomology, GModule};
use fermext_core::group::FinAbGroup;
use fermext_core::mext::{count_mext, count_preimage, FiberDerivation};
use fermext_core::o4::{o4_vanishes, O4Input};
use fermext_core::pointed::{build_rank4, catalog_entry, classify_h3ab, MextElement, Rank4Family};
use fermext_core::{Budget, Error, QZ};
use schema::group_name;
use serde::Serialize;
use std::fs;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fermext", version, about = "exact engine for fermionic actions and minimal modular extensions", max_term_width = 100)]
struct Cli {
    /// Enumeration budget (matrix entries / candidates); FERMEXT_BUDGET overrides.
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Output format.
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "json"])]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bar-resolution cohomology of a finite abelian group.
    Cohomology(CohomologyArgs),
    /// Check the hexagon and cocycle identities of a braided table.
    VerifyCocycle(VerifyCocycleArgs),
    /// Check the action equations (and braided compatibility) of a table file.
    VerifyAction(VerifyActionArgs),
    /// Build a rank-4 spin catalog entry from its family and invariant.
    ClassifyRank4(ClassifyRank4Args),
    /// Abelian 3-cocycle classes keyed by the quadratic form.
    ClassifyH3ab(ClassifyH3abArgs),
    /// Degree-3 obstructions (bosonic and fermionic) of an action file.
    ObstructionO3(ObstructionO3Args),
    /// Degree-4 obstruction of an action plus an invertible-object 2-cocycle.
    ObstructionO4(ObstructionO4Args),
    /// Count the minimal modular extensions over a super-group.
    CountMext(CountMextArgs),
}

#[derive(Args)]
struct CohomologyArgs {
    /// Group JSON, e.g. '{"cyclic":5}' or '{"invariant_factors":[2,2]}'.
    #[arg(long)]
    group: String,
    /// Coefficients: "qz" for divisible torsion coefficients, or group JSON
    /// for a finite trivial module.
    #[arg(long)]
    coeffs: String,
    #[arg(long)]
    degree: usize,
    /// Expected invariant-factor string (e.g. "Z/5"); exit 1 on mismatch.
    #[arg(long)]
    expect: Option<String>,
}

#[derive(Args)]
struct VerifyCocycleArgs {
    /// Catalog name ("toric", "3f", "semion2+", "semion2-", "z4-k1/8", ...).
    #[arg(long, conflicts_with = "file")]
    catalog: Option<String>,
    /// JSON file with {"group":…, "omega": table, "c": table, "fermion": [..]}.
    file: Option<String>,
}

#[derive(Args)]
struct VerifyActionArgs {
    /// Action JSON file.
    file: String,
    /// Also require braided compatibility (on by default).
    #[arg(long, default_value_t = true)]
    braided: bool,
}

#[derive(Args)]
struct ClassifyRank4Args {
    #[arg(long, value_parser = ["klein", "z4"])]
    family: String,
    /// The quadratic-form invariant k, e.g. "1/4" (klein) or "1/8" (z4).
    #[arg(long)]
    k: String,
}

#[derive(Args)]
struct ClassifyH3abArgs {
    #[arg(long)]
    group: String,
    /// Coefficient denominator N for (1/N)Z/Z; default 8 * exponent(A).
    #[arg(long)]
    denominator: Option<u64>,
}

#[derive(Args)]
struct ObstructionO3Args {
    /// Action JSON file.
    file: String,
    /// Super-group JSON file for the fermionic obstruction.
    #[arg(long)]
    supergroup: Option<String>,
    /// Exit 1 unless every computed obstruction vanishes.
    #[arg(long)]
    expect_zero: bool,
}

#[derive(Args)]
struct ObstructionO4Args {
    /// Action JSON file.
    action: String,
    /// 2-cocycle file: {"g|h": [coords], ...} valued in the fusion group.
    mu2: String,
    /// Exit 1 unless the obstruction class vanishes.
    #[arg(long)]
    expect_zero: bool,
}

#[derive(Args)]
struct CountMextArgs {
    /// Super-group JSON file.
    #[arg(long)]
    supergroup: String,
    /// Restrict to a single catalog target.
    #[arg(long)]
    target: Option<String>,
    /// Exit 1 unless the total matches.
    #[arg(long)]
    expect_order: Option<u64>,
}

fn read(path: &str) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| schema::parse_err(path, "<file>", e))
}

fn budget(cli: &Cli) -> Budget {
    if let Ok(v) = std::env::var("FERMEXT_BUDGET") {
        if let Ok(n) = v.parse() {
            return Budget::new(n);
        }
    }
    cli.budget.map(Budget::new).unwrap_or_default()
}

#[derive(Serialize)]
struct CohomologyOut {
    group: String,
    degree: usize,
    coefficients: String,
    invariant_factors: Vec<u64>,
    name: String,
    order: u64,
}

fn run(cli: &Cli) -> Result<i32, Error> {
    let b = budget(cli);
    let json = cli.format == "json";
    match &cli.command {
        Command::Cohomology(args) => {
            let g = schema::parse_group(&args.group, "--group")?;
            let result = if args.coeffs == "qz" {
                qz_cohomology(&g, args.degree, &b)?
            } else {
                let m = schema::parse_group(&args.coeffs, "--coeffs")?;
                let gm = GModule::trivial(g.clone(), m);
                FinAbGroup::new(cohomology(&gm, args.degree, &b)?.invariant_factors)
                    .unwrap_or_else(|_| FinAbGroup::trivial())
            };
            let name = group_name(&result);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&CohomologyOut {
                        group: group_name(&g),
                        degree: args.degree,
                        coefficients: args.coeffs.clone(),
                        invariant_factors: result.invariant_factors().to_vec(),
                        name: name.clone(),
                        order: result.order(),
                    })
                    .unwrap()
                );
            } else {
                println!("{name}");
            }
            if let Some(expect) = &args.expect {
                if *expect != name {
                    eprintln!("expected {expect}, computed {name}");
                    return Ok(1);
                }
            }
            Ok(0)
        }
        Command::VerifyCocycle(args) => {
            let cat = match (&args.catalog, &args.file) {
                (Some(name), _) => match catalog_entry(name) {
                    Some(MextElement::Pointed(cat)) => cat,
                    Some(MextElement::Ising(_)) => {
                        println!("valid (Ising entries are opaque catalog members)");
                        return Ok(0);
                    }
                    None => {
                        return Err(schema::parse_err(
                            "--catalog",
                            name,
                            "unknown catalog name",
                        ))
                    }
                },
                (None, Some(path)) => {
                    let text = read(path)?;
                    let spec: schema::CategorySpec = serde_json::from_str(&text)
                        .map_err(|e| schema::parse_err(path, "category", e))?;
                    spec.build(path)?
                }
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "provide --catalog NAME or a category file".into(),
                    ))
                }
            };
            let report = cat.data.verify();
            if report.is_valid() {
                println!("valid");
                Ok(0)
            } else {
                println!("{} violations", report.violation_count());
                for (x, y, z) in report.hexagon1.iter().take(10) {
                    println!("  hexagon-1 at ({x:?}, {y:?}, {z:?})");
                }
                for (x, y, z) in report.hexagon2.iter().take(10) {
                    println!("  hexagon-2 at ({x:?}, {y:?}, {z:?})");
                }
                for (x, y, z, w) in report.cocycle.iter().take(10) {
                    println!("  cocycle at ({x:?}, {y:?}, {z:?}, {w:?})");
                }
                for s in report.normalization.iter().take(10) {
                    println!("  {s}");
                }
                Ok(1)
            }
        }
        Command::VerifyAction(args) => {
            let act = schema::parse_action(&read(&args.file)?, &args.file)?;
            let report = act.verify_action();
            let braided = if args.braided {
                act.verify_braided()
            } else {
                vec![]
            };
            if report.is_valid() && braided.is_empty() {
                println!("valid");
                Ok(0)
            } else {
                println!(
                    "{} violations",
                    report.violation_count() + braided.len()
                );
                for (g, a, bb, c) in report.eq1.iter().take(10) {
                    println!("  associator-compatibility at ({g:?}; {a:?}, {bb:?}, {c:?})");
                }
                for (g, h, a, bb) in report.eq2.iter().take(10) {
                    println!("  tensor-structure at ({g:?}, {h:?}; {a:?}, {bb:?})");
                }
                for (g, h, k, a) in report.eq3.iter().take(10) {
                    println!("  composition at ({g:?}, {h:?}, {k:?}; {a:?})");
                }
                for g in report.fermion_moved.iter().take(10) {
                    println!("  fermion moved by {g:?}");
                }
                for s in report.normalization.iter().take(10) {
                    println!("  {s}");
                }
                for (g, a, bb) in braided.iter().take(10) {
                    println!("  braided compatibility at ({g:?}; {a:?}, {bb:?})");
                }
                Ok(1)
            }
        }
        Command::ClassifyRank4(args) => {
            let k: QZ = args
                .k
                .parse()
                .map_err(|e| schema::parse_err("--k", &args.k, e))?;
            let family = if args.family == "klein" {
                Rank4Family::Klein
            } else {
                Rank4Family::Z4
            };
            let cat = build_rank4(family, k)?;
            let report = cat.data.verify();
            let q = cat.quadratic_form();
            if json {
                #[derive(Serialize)]
                struct Out {
                    label: String,
                    group: String,
                    fermion: Vec<u64>,
                    k: String,
                    quadratic_form: Vec<String>,
                    modular: bool,
                    valid: bool,
                }
                println!(
                    "{}",
                    serde_json::to_string_pretty(&Out {
                        label: cat.label.clone().unwrap_or_default(),
                        group: group_name(cat.group()),
                        fermion: cat.fermion.coords.clone(),
                        k: k.to_string(),
                        quadratic_form: q.iter().map(|v| v.to_string()).collect(),
                        modular: cat.data.is_modular(),
                        valid: report.is_valid(),
                    })
                    .unwrap()
                );
            } else {
                println!("label: {}", cat.label.clone().unwrap_or_default());
                println!("group: {}", group_name(cat.group()));
                println!("fermion: {:?}", cat.fermion.coords);
                let table: Vec<String> = cat
                    .group()
                    .elements()
                    .iter()
                    .zip(&q)
                    .map(|(e, v)| format!("q{:?} = {v}", e.coords))
                    .collect();
                println!("{}", table.join(", "));
                println!("modular: {}", cat.data.is_modular());
                println!("valid: {}", report.is_valid());
            }
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::ClassifyH3ab(args) => {
            let a = schema::parse_group(&args.group, "--group")?;
            let n = args.denominator.unwrap_or(8 * a.exponent().max(1));
            let classes = classify_h3ab(&a, n, &b)?;
            if json {
                #[derive(Serialize)]
                struct Out {
                    group: String,
                    denominator: u64,
                    class_count: usize,
                    quadratic_forms: Vec<Vec<String>>,
                }
                println!(
                    "{}",
                    serde_json::to_string_pretty(&Out {
                        group: group_name(&a),
                        denominator: n,
                        class_count: classes.len(),
                        quadratic_forms: classes
                            .iter()
                            .map(|c| c.q.iter().map(|v| v.to_string()).collect())
                            .collect(),
                    })
                    .unwrap()
                );
            } else {
                println!("classes: {}", classes.len());
                for class in &classes {
                    let q: Vec<String> = class.q.iter().map(|v| v.to_string()).collect();
                    println!("  q = [{}]", q.join(", "));
                }
            }
            Ok(0)
        }
        Command::ObstructionO3(args) => {
            let act = schema::parse_action(&read(&args.file)?, &args.file)?;
            let o3 = o3_bosonic(&act)?;
            let bosonic_zero = o3.is_zero();
            let mut fermionic_zero = true;
            let mut fermionic_json = serde_json::Value::Null;
            let mut fermionic_text = None;
            if let Some(path) = &args.supergroup {
                let sg = schema::parse_supergroup(&read(path)?, path)?;
                let theta = theta_class(&act.f_normalize())?;
                let (khat, r) = fermext_core::action::khat_module(&act)?;
                let verdict = o3_fermionic(&theta, &sg, &khat, &r, &b)?;
                fermionic_zero = verdict.vanishes();
                let (degree, vanishes, rep) = match &verdict {
                    FermO3::Degree2 { vanishes, representative } => (2, *vanishes, representative),
                    FermO3::Degree3 { vanishes, representative } => (3, *vanishes, representative),
                };
                fermionic_json = serde_json::json!({
                    "degree": degree,
                    "vanishes": vanishes,
                    "representative": schema::cochain_to_json(rep),
                });
                fermionic_text = Some(format!(
                    "fermionic obstruction (degree {degree}): vanishes = {vanishes}"
                ));
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "bosonic_identically_zero": bosonic_zero,
                        "bosonic": schema::cochain_to_json(&o3),
                        "fermionic": fermionic_json,
                    }))
                    .unwrap()
                );
            } else {
                println!("bosonic obstruction identically zero: {bosonic_zero}");
                if let Some(t) = fermionic_text {
                    println!("{t}");
                }
            }
            if args.expect_zero && !(bosonic_zero && fermionic_zero) {
                return Ok(1);
            }
            Ok(0)
        }
        Command::ObstructionO4(args) => {
            let act = schema::parse_action(&read(&args.action)?, &args.action)?;
            let mu2 = schema::parse_mu2(
                &read(&args.mu2)?,
                &args.mu2,
                &act.actor.clone(),
                act.target.group(),
            )?;
            let input = O4Input::new(act, mu2)?;
            let verdict = o4_vanishes(&input, &b)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "vanishes": verdict.vanishes,
                        "obstruction": schema::qz_cochain_to_json(&verdict.obstruction),
                        "witness": verdict
                            .witness
                            .as_ref()
                            .map(schema::qz_cochain_to_json)
                            .unwrap_or(serde_json::Value::Null),
                    }))
                    .unwrap()
                );
            } else if verdict.vanishes {
                println!("obstruction class: trivial");
                let witness = verdict.witness.as_ref().unwrap();
                let nonzero = witness.values.iter().filter(|v| !v.is_zero()).count();
                println!("witness: 3-cochain with {nonzero} nonzero values");
            } else {
                println!("obstruction class: nontrivial");
                let nonzero = verdict
                    .obstruction
                    .values
                    .iter()
                    .filter(|v| !v.is_zero())
                    .count();
                println!("representative: 4-cocycle with {nonzero} nonzero values");
            }
            if !verdict.vanishes && args.expect_zero {
                return Ok(1);
            }
            Ok(0)
        }
        Command::CountMext(args) => {
            let sg = schema::parse_supergroup(&read(&args.supergroup)?, &args.supergroup)?;
            if let Some(name) = &args.target {
                let target = catalog_entry(name).ok_or_else(|| {
                    schema::parse_err("--target", name, "unknown catalog name")
                })?;
                let triples = count_preimage(&target, &sg, &b)?;
                println!("target: {name}");
                println!("triples: {triples}");
                return Ok(0);
            }
            let count = count_mext(&sg, &b)?;
            if json {
                #[derive(Serialize)]
                struct TargetOut {
                    target: String,
                    homs_unobstructed: usize,
                    mu_classes: u64,
                    phi_order: u64,
                    triples: u64,
                    fiber: u64,
                    fiber_by_symmetry: bool,
                    in_image: bool,
                }
                #[derive(Serialize)]
                struct Out {
                    group: String,
                    alpha_trivial: bool,
                    targets: Vec<TargetOut>,
                    total: u64,
                    kernel: u64,
                    image: u64,
                }
                let out = Out {
                    group: group_name(&sg.group),
                    alpha_trivial: sg.is_trivial_class(&b)?,
                    targets: count
                        .targets
                        .iter()
                        .map(|t| TargetOut {
                            target: t.target.name(),
                            homs_unobstructed: t
                                .rho_breakdown
                                .iter()
                                .filter(|r| r.o3_vanishes)
                                .count(),
                            mu_classes: t
                                .rho_breakdown
                                .iter()
                                .map(|r| r.mu_classes_surviving_o4)
                                .sum(),
                            phi_order: t.phi_order,
                            triples: t.triples,
                            fiber: t.fiber,
                            fiber_by_symmetry: t.fiber_derivation
                                == FiberDerivation::FiberSymmetry,
                            in_image: t.in_image,
                        })
                        .collect(),
                    total: count.total,
                    kernel: count.kernel_order,
                    image: count.image_size,
                };
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                println!(
                    "{:<10} {:>5} {:>4} {:>4} {:>8} {:>6}  note",
                    "target", "homs", "mu", "phi", "triples", "fiber"
                );
                for t in &count.targets {
                    let homs = t.rho_breakdown.iter().filter(|r| r.o3_vanishes).count();
                    let mu: u64 = t
                        .rho_breakdown
                        .iter()
                        .map(|r| r.mu_classes_surviving_o4)
                        .sum();
                    let note = match (t.in_image, t.fiber_derivation) {
                        (false, _) => "not in image",
                        (true, FiberDerivation::FiberSymmetry) => "derived by fiber symmetry",
                        (true, FiberDerivation::Triples) => "",
                    };
                    println!(
                        "{:<10} {:>5} {:>4} {:>4} {:>8} {:>6}  {}",
                        t.target.name(),
                        homs,
                        mu,
                        t.phi_order,
                        t.triples,
                        t.fiber,
                        note
                    );
                }
                println!("total: {}", count.total);
                println!("kernel: {}", count.kernel_order);
                println!("image: {}", count.image_size);
            }
            if let Some(expect) = args.expect_order {
                if count.total != expect {
                    eprintln!("expected total {expect}, computed {}", count.total);
                    return Ok(1);
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
