//! Command-line front end: every query prints one JSON document with sorted
//! keys on standard output.
//!
//! Exit codes: 0 on success, 1 when `check-props` finds a violation, 2 on
//! malformed input.

pub mod config;
pub mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use stabtop::calabi_yau::{
    check_prop_p1, check_prop_point, cy_class_in, from_heart_coords, pushforward_charge,
    twist_identity_violations, twist_k, twist_obj, twist_obj_inverse, CYUniverse, PropReport,
};
use stabtop::exact::format_rational;
use stabtop::lattice::{faithfulness_witness, is_faithful, sample_faithfulness};
use stabtop::objects::cy_class;
use stabtop::oracle::{hn_violations, hom_table_violations, OracleObject};
use stabtop::stability::{
    factor_class_sum, is_semistable, is_stable, phase, proportionality_witness, s_equivalent,
    stable_factors,
};
use stabtop::ztilde::{enumerate_universe, PointSet, SpherePoint, ZtildeIndex};
use stabtop::{
    class_of, hn, parse_object, regime, ztilde, Charge, HomTable, Indec, KClassCY, KroneckerHom,
    ObjectExpr, ProjPoint,
};

pub use config::{Config, Model};

#[derive(Parser, Debug)]
#[command(name = "stabtop", version, about = "Stability conditions on D(P^1) and local P^1")]
pub struct Cli {
    /// JSON configuration: charge, model, w, bounds, seed.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Harder-Narasimhan filtration.
    Hn { object: String },
    /// Image in the Riemann sphere.
    Ztilde { object: String },
    /// Universe members with the same image.
    Fiber { object: String },
    /// Jordan-Holder factors of a semistable object.
    Jh { object: String },
    /// Whether two semistable objects of one phase are S-equivalent.
    Sequiv { first: String, second: String },
    /// Whether the configured charge is faithful.
    FaithfulCheck,
    /// Fraction of non-faithful charges on a rational grid.
    SampleFaithful {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        grid: i64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Spherical twist along O(w-1) on shifts of O(w-1) and O(w).
    Twist {
        object: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Run the property checkers on the configured universe.
    CheckProps {
        #[arg(long)]
        oracle: bool,
        #[arg(long, hide = true)]
        corrupt_hom_cell: bool,
    },
    /// Plot the images of the objects listed in a file, one per line.
    Plot {
        objects: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Result of a command: a JSON document and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: Value,
    pub code: i32,
}

#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

fn ok(output: Value) -> CmdResult {
    Ok(Outcome { output, code: 0 })
}

/// Recursively rebuilds objects so keys come out sorted regardless of the
/// map backing `serde_json` was compiled with.
pub fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let entries: BTreeMap<String, Value> =
                m.into_iter().map(|(k, v)| (k, sorted(v))).collect();
            Value::Object(entries.into_iter().collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}

pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(&sorted(v.clone())).expect("json values always serialize")
}

struct Ctx {
    config: Option<Config>,
}

impl Ctx {
    fn config(&self) -> Result<&Config, Failure> {
        self.config
            .as_ref()
            .ok_or_else(|| Failure("this command needs --config".into()))
    }

    fn charge(&self) -> Result<&Charge, Failure> {
        Ok(&self.config()?.charge)
    }

    fn heart(&self) -> Option<i64> {
        match &self.config {
            Some(c) if c.model == Model::LocalP1 => Some(c.w),
            _ => None,
        }
    }
}

fn charge_json(z: &Charge) -> Value {
    serde_json::to_value(z).expect("charges always serialize")
}

fn class_pair(x: &ObjectExpr) -> Value {
    class_of(x).to_json()
}

fn cy_json(c: &KClassCY) -> Value {
    json!({"a": c.a.to_string(), "b": c.b.to_string()})
}

fn with_heart(ctx: &Ctx, mut v: Value, x: &ObjectExpr) -> Value {
    if let Some(w) = ctx.heart() {
        let obj = v.as_object_mut().expect("command outputs are objects");
        obj.insert("heart".into(), json!(w));
        obj.insert("sheaf".into(), json!(from_heart_coords(w, x).to_string()));
        obj.insert("cy_class".into(), cy_json(&cy_class_in(w, x)));
    }
    v
}

fn cmd_hn(ctx: &Ctx, text: &str) -> CmdResult {
    let z = ctx.charge()?;
    let x = parse_object(text)?;
    let f = hn(z, &x);
    let v = json!({
        "object": x.to_string(),
        "class": class_pair(&x),
        "regime": regime(z).to_string(),
        "semistable": f.len() == 1,
        "factors": f.to_json(z),
    });
    ok(with_heart(ctx, v, &x))
}

fn cmd_ztilde(ctx: &Ctx, text: &str) -> CmdResult {
    let z = ctx.charge()?;
    let x = parse_object(text)?;
    let img = ztilde(z, &x);
    ok(with_heart(ctx, json!({"object": x.to_string(), "image": img.to_json()}), &x))
}

fn cmd_fiber(ctx: &Ctx, text: &str) -> CmdResult {
    let cfg = ctx.config()?;
    let x = parse_object(text)?;
    let universe = enumerate_universe(&cfg.bounds)?;
    let target = ztilde(&cfg.charge, &x);
    let index = ZtildeIndex::new(&cfg.charge, &universe);
    let members: Vec<String> = index.fiber(&target).iter().map(|m| m.to_string()).collect();
    ok(json!({
        "object": x.to_string(),
        "image": target.to_json(),
        "universe_bounds": cfg.bounds.to_json(),
        "universe_size": universe.len(),
        "fiber": members,
        "within_universe": true,
    }))
}

fn cmd_jh(ctx: &Ctx, text: &str) -> CmdResult {
    let z = ctx.charge()?;
    let x = parse_object(text)?;
    let ph = phase(z, &x)?;
    let factors = stable_factors(z, &x)?;
    let listed: Vec<Value> = factors
        .terms()
        .map(|(s, m)| {
            let single = ObjectExpr::summand(s.indec.clone(), s.shift, 1u32);
            json!({"factor": single.to_string(), "multiplicity": m.to_string()})
        })
        .collect();
    let v = json!({
        "object": x.to_string(),
        "phase": ph.to_json(),
        "phase_approx": ph.to_f64(),
        "stable": is_stable(z, &x)?,
        "factors": listed,
        "cycle": factors.to_string(),
    });
    ok(with_heart(ctx, v, &x))
}

fn cmd_sequiv(ctx: &Ctx, a: &str, b: &str) -> CmdResult {
    let z = ctx.charge()?;
    let (x, y) = (parse_object(a)?, parse_object(b)?);
    let same = s_equivalent(z, &x, &y)?;
    ok(json!({
        "first": x.to_string(),
        "second": y.to_string(),
        "phase": phase(z, &x)?.to_json(),
        "first_cycle": stable_factors(z, &x)?.to_string(),
        "second_cycle": stable_factors(z, &y)?.to_string(),
        "s_equivalent": same,
    }))
}

fn cmd_faithful(ctx: &Ctx) -> CmdResult {
    let z = ctx.charge()?;
    let witness = faithfulness_witness(z).map(|(e, f)| json!([e.to_json(), f.to_json()]));
    ok(json!({
        "charge": charge_json(z),
        "determinant": format_rational(&z.determinant()),
        "faithful": is_faithful(z),
        "regime": regime(z).to_string(),
        "witness": witness,
    }))
}

fn cmd_sample(ctx: &Ctx, count: usize, grid: i64, seed: Option<u64>) -> CmdResult {
    let seed = seed
        .or_else(|| ctx.config.as_ref().and_then(|c| c.seed))
        .ok_or_else(|| Failure("sample-faithful needs --seed or a seed in the config".into()))?;
    let r = sample_faithfulness(grid, count, seed)?;
    ok(json!({
        "samples": r.samples,
        "grid_bound": grid,
        "seed": seed,
        "non_faithful": r.non_faithful,
        "fraction_non_faithful": format_rational(&r.fraction_non_faithful),
        "fraction_approx": stabtop::exact::to_f64(&r.fraction_non_faithful),
        "witnesses": r.witnesses.iter().map(charge_json).collect::<Vec<_>>(),
    }))
}

fn cmd_twist(ctx: &Ctx, text: &str, inverse: bool) -> CmdResult {
    let cfg = ctx.config()?;
    if cfg.model != Model::LocalP1 {
        return Err(Failure("twist needs model localP1".into()));
    }
    let w = cfg.w;
    let x = parse_object(text)?;
    let image = if inverse { twist_obj_inverse(w, &x)? } else { twist_obj(w, &x)? };
    let s = KClassCY::line_bundle(w - 1);
    let mut v = json!({
        "w": w,
        "inverse": inverse,
        "object": x.to_string(),
        "image": image.to_string(),
        "class": cy_json(&cy_class(&x)),
        "image_class": cy_json(&cy_class(&image)),
        "reflected_class": cy_json(&twist_k(&s, &cy_class(&x))?),
    });
    if !inverse {
        let t = pushforward_charge(w, &cfg.charge)?;
        v.as_object_mut().unwrap().insert(
            "transported_charge".into(),
            json!({"w": t.w, "charge": charge_json(&t.charge), "regime": t.regime.to_string()}),
        );
    }
    ok(v)
}

/// The Kronecker table with one deliberately wrong cell.
struct CorruptedHom;

impl HomTable for CorruptedHom {
    fn hom(&self, m: &Indec, n: &Indec, i: u8) -> u64 {
        let base = KroneckerHom.hom(m, n, i);
        if i == 0 && *m == Indec::Preproj(0) && *n == Indec::Preproj(1) {
            base + 1
        } else {
            base
        }
    }
}

fn check(name: &str, checked: usize, violations: Vec<String>, notes: Vec<String>) -> Value {
    json!({"name": name, "checked": checked, "violations": violations, "notes": notes})
}

fn prop_check(r: &PropReport) -> Value {
    let mut v = r.to_json();
    v.as_object_mut().unwrap().insert("name".into(), json!(r.proposition));
    v
}

fn fiber_checks(z: &Charge, universe: &[ObjectExpr]) -> Result<Vec<Value>, Failure> {
    let faithful = is_faithful(z);
    let index = ZtildeIndex::new(z, universe);
    let mut hn_bad = Vec::new();
    for x in universe {
        let f = hn(z, x);
        let decreasing = f.factors().windows(2).all(|p| p[0].phase > p[1].phase);
        if !decreasing || factor_class_sum(&f) != class_of(x) {
            hn_bad.push(format!("HN of {x} is not a valid filtration"));
        }
    }
    let mut fiber_bad = Vec::new();
    let mut class_bad = Vec::new();
    let mut fibers = 0;
    let mut seen = std::collections::HashSet::new();
    for (i, x) in universe.iter().enumerate() {
        let img = index.image(i);
        if x.is_zero() || img.len() != 1 || !is_semistable(z, x)? || !seen.insert(img.clone()) {
            continue;
        }
        fibers += 1;
        for y in index.fiber(img) {
            if !is_semistable(z, y)? {
                fiber_bad.push(format!("{y} shares the image of {x} but is not semistable"));
            }
            if faithful && class_of(y) != class_of(x) {
                class_bad.push(format!("{y} shares the image of {x} with another class"));
            }
        }
    }
    let mut prop_bad = Vec::new();
    let mut pairs = 0;
    if faithful {
        let mut by_phase: BTreeMap<_, Vec<&ObjectExpr>> = BTreeMap::new();
        for x in universe.iter().filter(|x| !x.is_zero()) {
            if let Ok(p) = phase(z, x) {
                by_phase.entry(p).or_default().push(x);
            }
        }
        for members in by_phase.values() {
            let mut reps: BTreeMap<_, &ObjectExpr> = BTreeMap::new();
            for x in members {
                reps.entry(class_of(x)).or_insert(x);
            }
            let reps: Vec<_> = reps.into_values().collect();
            for (i, e) in reps.iter().enumerate() {
                for f in &reps[i + 1..] {
                    pairs += 1;
                    if let Err(err) = proportionality_witness(z, e, f) {
                        prop_bad.push(format!("{e} and {f}: {err}"));
                    }
                }
            }
        }
    }
    let skip = |what: &str| if faithful { vec![] } else { vec![format!("charge is not faithful; {what} skipped")] };
    Ok(vec![
        check("hn-filtration", universe.len(), hn_bad, vec![]),
        check("fiber-semistable", fibers, fiber_bad, vec![]),
        check("fiber-class", if faithful { fibers } else { 0 }, class_bad, skip("class check")),
        check("proportionality", pairs, prop_bad, skip("proportionality")),
    ])
}

fn oracle_checks(z: &Charge, universe: &[ObjectExpr], table: &dyn HomTable) -> Result<Vec<Value>, Failure> {
    let hom = hom_table_violations(table, &[2, 3, 5], 4)?;
    let canonical = ProjPoint::over_prime(2);
    let mut prepared = Vec::new();
    let mut skipped = 0;
    for x in universe.iter().filter(|x| !x.is_zero()) {
        let on_f2 = x.terms().all(|(s, _)| match &s.indec {
            Indec::Regular(p, _) => canonical.contains(p),
            _ => true,
        });
        match OracleObject::new(x, 2) {
            Ok(o) if on_f2 => prepared.push((x.clone(), o)),
            _ => skipped += 1,
        }
    }
    let (hn_bad, mut notes) = match hn_violations(z, &prepared) {
        Ok(v) => (v, vec![]),
        Err(e) => (vec![e.to_string()], vec![]),
    };
    if skipped > 0 {
        notes.push(format!("{skipped} objects outside P^1(F_2) or the enumeration guard"));
    }
    Ok(vec![
        check("oracle-hom", 3, hom, vec!["primes 2, 3, 5; components up to 4".into()]),
        check("oracle-hn", prepared.len(), hn_bad, notes),
    ])
}

fn cmd_check_props(ctx: &Ctx, oracle: bool, corrupt: bool) -> CmdResult {
    let cfg = ctx.config()?;
    let z = &cfg.charge;
    let universe = enumerate_universe(&cfg.bounds)?;
    let mut checks = fiber_checks(z, &universe)?;
    if cfg.model == Model::LocalP1 {
        checks.push(check("twist-identities", 2, twist_identity_violations(cfg.w), vec![]));
        if is_faithful(z) {
            let u = CYUniverse {
                w: cfg.w,
                bounds: cfg.bounds.clone(),
                objects: universe.clone(),
            };
            checks.push(prop_check(&check_prop_point(z, &u)?));
            checks.push(prop_check(&check_prop_p1(z, cfg.w, &cfg.bounds)?));
        } else {
            checks.push(check("point-fiber", 0, vec![], vec!["charge is not faithful; skipped".into()]));
        }
    }
    if oracle {
        let table: &dyn HomTable = if corrupt { &CorruptedHom } else { &KroneckerHom };
        checks.extend(oracle_checks(z, &universe, table)?);
    }
    let passed = checks
        .iter()
        .all(|c| c["violations"].as_array().is_some_and(Vec::is_empty));
    Ok(Outcome {
        output: json!({
            "charge": charge_json(z),
            "model": match cfg.model { Model::P1 => "P1", Model::LocalP1 => "localP1" },
            "universe_bounds": cfg.bounds.to_json(),
            "universe_size": universe.len(),
            "faithful": is_faithful(z),
            "regime": regime(z).to_string(),
            "checks": checks,
            "passed": passed,
        }),
        code: if passed { 0 } else { 1 },
    })
}

/// Parses an objects file: one expression per line, blank lines and lines
/// starting with `#` ignored.
pub fn read_objects(text: &str) -> Result<Vec<ObjectExpr>, Failure> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| parse_object(l).map_err(|e| Failure(format!("line {}: {e}", i + 1))))
        .collect()
}

fn cmd_plot(ctx: &Ctx, objects: &PathBuf, out: &PathBuf) -> CmdResult {
    let z = ctx.charge()?;
    let text = std::fs::read_to_string(objects)
        .map_err(|e| Failure(format!("cannot read {}: {e}", objects.display())))?;
    let xs = read_objects(&text)?;
    let all = xs.iter().fold(PointSet::default(), |acc, x| acc.union(&ztilde(z, x)));
    let coords: Vec<(f64, f64)> = all.points().iter().filter_map(SpherePoint::approx).collect();
    let infinite = all.points().len() - coords.len();
    let doc = svg::scatter(&coords, &format!("Z~ images under {z}"));
    std::fs::write(out, doc).map_err(|e| Failure(format!("cannot write {}: {e}", out.display())))?;
    ok(json!({
        "objects": xs.len(),
        "markers": coords.len(),
        "infinity_points": infinite,
        "out": out.display().to_string(),
    }))
}

pub fn run(cli: &Cli) -> CmdResult {
    let config = cli.config.as_deref().map(Config::load).transpose().map_err(Failure)?;
    let ctx = Ctx { config };
    match &cli.command {
        Command::Hn { object } => cmd_hn(&ctx, object),
        Command::Ztilde { object } => cmd_ztilde(&ctx, object),
        Command::Fiber { object } => cmd_fiber(&ctx, object),
        Command::Jh { object } => cmd_jh(&ctx, object),
        Command::Sequiv { first, second } => cmd_sequiv(&ctx, first, second),
        Command::FaithfulCheck => cmd_faithful(&ctx),
        Command::SampleFaithful { count, grid, seed } => cmd_sample(&ctx, *count, *grid, *seed),
        Command::Twist { object, inverse } => cmd_twist(&ctx, object, *inverse),
        Command::CheckProps { oracle, corrupt_hom_cell } => {
            cmd_check_props(&ctx, *oracle, *corrupt_hom_cell)
        }
        Command::Plot { objects, out } => cmd_plot(&ctx, objects, out),
    }
}

/// Runs the parsed command, prints its output and returns the exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(o) => {
            println!("{}", render(&o.output));
            o.code
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
