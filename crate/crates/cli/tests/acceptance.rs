//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num::{BigInt, BigRational, Integer, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use stabtop::calabi_yau::{
    check_prop_p1, check_prop_point, heart_generators, twist_k, twist_obj, CYUniverse,
};
use stabtop::exact::{q_frac, Gauss};
use stabtop::lattice::{
    charge_eval, is_faithful, perturb_to_faithful, random_grid_charge, sample_faithfulness,
};
use stabtop::objects::Summand;
use stabtop::oracle::{hom_table_violations, same_profile, OracleObject};
use stabtop::stability::{hn_profile, is_semistable, phase, proportionality_witness, random_charge_in};
use stabtop::ztilde::{
    enumerate_universe, semistable_in_region, union_law_check, witness_near_infinity, PointSet,
    Region, SpherePoint, ZtildeIndex,
};
use stabtop::{
    class_of, cy_class, euler_cy, format_object, numerical_class, parse_object, ztilde, Charge, Error,
    Indec, KClassCY, KroneckerHom, ObjectExpr, Phase, ProjPoint, Regime, UniverseBounds,
};

type Criterion = fn() -> Result<String, String>;

const REGIMES: [Regime; 3] = [Regime::AllSemistable, Regime::Collapsed, Regime::Degenerate];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn first_few(v: &[String]) -> String {
    v.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

fn small_universe() -> UniverseBounds {
    UniverseBounds::new(3, 3, (-1, 1), ProjPoint::over_prime(2))
}

fn oracle_hn_equivalence() -> Result<String, String> {
    let universe = enumerate_universe(&small_universe()).map_err(|e| e.to_string())?;
    let prepared: Vec<_> = universe
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| OracleObject::new(x, 2).map(|o| (x, o)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    let mut per_regime = BTreeMap::new();
    for i in 0..50 {
        let reg = REGIMES[i % 3];
        *per_regime.entry(reg.to_string()).or_insert(0) += 1;
        let z = random_charge_in(&mut rng, reg, 8);
        for (x, oracle) in &prepared {
            let brute = oracle.hn(&z).map_err(|e| e.to_string())?;
            if !same_profile(&hn_profile(&z, x), &brute) {
                mismatches.push(format!("{x} under {z}"));
            }
        }
    }
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches: {}", mismatches.len(), first_few(&mismatches))
    })?;
    Ok(format!(
        "{} objects x 50 charges {per_regime:?}, 0 mismatches",
        prepared.len()
    ))
}

fn hom_soundness() -> Result<String, String> {
    let v = hom_table_violations(&KroneckerHom, &[2, 3, 5], 4).map_err(|e| e.to_string())?;
    ensure(v.is_empty(), || format!("{} violations: {}", v.len(), first_few(&v)))?;
    let mut pairs = 0;
    for p in [2u32, 3, 5] {
        let n = stabtop::oracle::indecomposables_up_to(4, p).len();
        pairs += n * n;
    }
    Ok(format!("{pairs} ordered pairs over F_2, F_3, F_5; table, oracle and Euler form agree"))
}

fn paper_constants() -> Result<String, String> {
    let o = KClassCY::line_bundle(0);
    ensure(euler_cy(&o, &o) == BigInt::from(2), || "chi(O, O) != 2".into())?;
    ensure(numerical_class(&KClassCY::point()).is_zero(), || {
        "numerical class of a point is not zero".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let e = KClassCY::new(
            rng.gen_range(-1_000_000i64..=1_000_000),
            rng.gen_range(-1_000_000i64..=1_000_000),
        );
        let chi = euler_cy(&e, &e);
        ensure(!chi.is_negative() && chi.is_even(), || format!("chi({e}, {e}) = {chi}"))?;
    }
    Ok("chi(O,O) = 2, [O_x] numerically zero, 1000 classes even and nonnegative".into())
}

fn planted_pair(rng: &mut ChaCha8Rng) -> Charge {
    loop {
        let z1 = Gauss::new(
            q_frac(rng.gen_range(-20..=20), rng.gen_range(1..=20)),
            q_frac(rng.gen_range(0..=20), rng.gen_range(1..=20)),
        );
        if !z1.in_stability_cone() {
            continue;
        }
        let k = q_frac(rng.gen_range(1..=20), rng.gen_range(1..=20));
        return Charge::new(z1.clone(), z1.scale_q(&k)).unwrap();
    }
}

fn independent_det(z: &Charge) -> BigRational {
    &z.z1().re * &z.z2().im - &z.z2().re * &z.z1().im
}

fn faithfulness() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let z = planted_pair(&mut rng);
        ensure(!is_faithful(&z), || format!("planted {z} reported faithful"))?;
        let w = random_grid_charge(&mut rng, 50);
        ensure(is_faithful(&w) == !independent_det(&w).is_zero(), || {
            format!("{w} misclassified")
        })?;
    }
    let eps = q_frac(1, 1 << 20);
    for _ in 0..1000 {
        let z = planted_pair(&mut rng);
        let w = perturb_to_faithful(&z, &eps);
        ensure(!independent_det(&w).is_zero(), || format!("perturbation of {z} not faithful"))?;
        for (a, b) in [(w.z1(), z.z1()), (w.z2(), z.z2())] {
            let d = (&a.re - &b.re).abs().max((&a.im - &b.im).abs());
            ensure(d <= eps, || format!("perturbation of {z} moved by {d}"))?;
        }
    }
    let report = sample_faithfulness(100, 1000, 4).map_err(|e| e.to_string())?;
    ensure(report.fraction_non_faithful <= q_frac(1, 20), || {
        format!("non-faithful fraction {}", report.fraction_non_faithful)
    })?;
    Ok(format!(
        "planted detected, 1000 perturbations at 2^-20 faithful, grid fraction {}/{}",
        report.non_faithful, report.samples
    ))
}

fn proportionality() -> Result<String, String> {
    let bounds = UniverseBounds::new(6, 6, (0, 0), ProjPoint::over_prime(2));
    let universe = enumerate_universe(&bounds).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0usize;
    let mut charges = 0;
    while charges < 20 {
        let z = random_grid_charge(&mut rng, 12);
        if !is_faithful(&z) {
            continue;
        }
        charges += 1;
        let mut by_phase: BTreeMap<Phase, Vec<&ObjectExpr>> = BTreeMap::new();
        for x in universe.iter().filter(|x| !x.is_zero()) {
            if let Ok(p) = phase(&z, x) {
                by_phase.entry(p).or_default().push(x);
            }
        }
        for members in by_phase.values() {
            for (i, e) in members.iter().enumerate() {
                for f in &members[i + 1..] {
                    pairs += 1;
                    let (ce, cf) = (class_of(e), class_of(f));
                    if ce == cf {
                        continue;
                    }
                    let q = proportionality_witness(&z, e, f).map_err(|err| format!("{e}, {f}: {err}"))?;
                    ensure(q.is_positive(), || format!("{e}, {f}: ratio {q}"))?;
                    let scaled = (
                        BigRational::from(cf.d1.clone()) * &q,
                        BigRational::from(cf.d2.clone()) * &q,
                    );
                    ensure(
                        scaled == (BigRational::from(ce.d1.clone()), BigRational::from(ce.d2.clone())),
                        || format!("[{e}] != {q} [{f}]"),
                    )?;
                }
            }
        }
    }
    Ok(format!("20 faithful charges, {} objects, {pairs} same-phase pairs, 0 failures", universe.len()))
}

fn fiber_corollaries() -> Result<String, String> {
    let universe = enumerate_universe(&small_universe()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut fibers = 0usize;
    for i in 0..30 {
        let z = random_charge_in(&mut rng, REGIMES[i % 3], 8);
        let faithful = is_faithful(&z);
        let index = ZtildeIndex::new(&z, &universe);
        let mut seen = HashSet::new();
        for (j, x) in universe.iter().enumerate() {
            let img = index.image(j);
            if x.is_zero() || !is_semistable(&z, x).unwrap() || !seen.insert(img.clone()) {
                continue;
            }
            fibers += 1;
            for y in index.fiber(img) {
                ensure(!y.is_zero() && is_semistable(&z, y).unwrap(), || {
                    format!("{y} in the fiber of {x} under {z} is not semistable")
                })?;
                if faithful {
                    ensure(class_of(y) == class_of(x), || {
                        format!("{y} and {x} share an image under {z} with different classes")
                    })?;
                }
            }
        }
    }
    Ok(format!("30 charges, {} objects, {fibers} semistable fibers checked", universe.len()))
}

fn point_propositions() -> Result<String, String> {
    let bounds = small_universe();
    let universe = enumerate_universe(&bounds).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut summary = Vec::new();
    for reg in [Regime::AllSemistable, Regime::Collapsed] {
        let mut done = 0;
        while done < 10 {
            let z = random_charge_in(&mut rng, reg, 8);
            if !is_faithful(&z) {
                continue;
            }
            done += 1;
            let w = rng.gen_range(-2i64..=2);
            let r = check_prop_p1(&z, w, &bounds).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("point objects, {z}, w={w}: {}", first_few(&r.violations)))?;
            let expected_heart = if reg == Regime::Collapsed { w - 1 } else { w };
            ensure(r.heart == expected_heart, || format!("{z}: reduced to heart {}", r.heart))?;
            let u = CYUniverse { w, bounds: bounds.clone(), objects: universe.clone() };
            let r = check_prop_point(&z, &u).map_err(|e| e.to_string())?;
            ensure(r.passed() && r.checked > 0, || {
                format!("spherical factor, {z}, w={w}: {}", first_few(&r.violations))
            })?;
        }
        summary.push(format!("{reg} x10"));
    }
    for _ in 0..10 {
        let z = random_charge_in(&mut rng, Regime::Degenerate, 8);
        match check_prop_p1(&z, 0, &bounds) {
            Err(Error::NotFaithful) => {}
            other => return Err(format!("degenerate {z}: {:?}", other.map(|r| r.violations))),
        }
    }
    summary.push("Degenerate x10 rejected as non-faithful".into());
    Ok(summary.join(", "))
}

fn finite_mass_sq(p: &SpherePoint) -> Option<&BigRational> {
    match p {
        SpherePoint::Finite(f) => Some(&f.mass_sq),
        SpherePoint::Infinity => None,
    }
}

fn random_indec(rng: &mut ChaCha8Rng) -> Indec {
    let points = ProjPoint::over_prime(3);
    match rng.gen_range(0..3) {
        0 => Indec::Preproj(rng.gen_range(0..5)),
        1 => Indec::Preinj(rng.gen_range(0..5)),
        _ => Indec::Regular(points[rng.gen_range(0..points.len())].clone(), rng.gen_range(1..4)),
    }
}

fn connectedness() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = 0;
    while pairs < 1000 {
        let z = random_charge_in(&mut rng, REGIMES[pairs % 3], 8);
        let e = ObjectExpr::summand(random_indec(&mut rng), rng.gen_range(-1..=1), rng.gen_range(1u32..3));
        let f = ObjectExpr::summand(random_indec(&mut rng), rng.gen_range(-1..=1), rng.gen_range(1u32..3));
        let (Ok(pe), Ok(pf)) = (phase(&z, &e), phase(&z, &f)) else { continue };
        if pe == pf {
            continue;
        }
        pairs += 1;
        ensure(union_law_check(&z, &e, &f).unwrap(), || format!("union law fails for {e}, {f} under {z}"))?;
    }

    for seed in 0..20 {
        let mut r = ChaCha8Rng::seed_from_u64(100 + seed);
        let z = random_grid_charge(&mut r, 10);
        for eps in [0.1f64, 0.01] {
            let w = witness_near_infinity(&z, eps);
            ensure(is_semistable(&z, &w).unwrap(), || format!("{w} not semistable"))?;
            let (s, n) = w.terms().next().unwrap();
            ensure(s.indec == Indec::S2 && s.shift == 0, || format!("unexpected witness {w}"))?;
            // |Z(S2^n)| = n |z2|, recomputed from scratch
            let log_m = (n.bits() as f64 - 1.0) * std::f64::consts::LN_2
                + 0.5 * stabtop::exact::to_f64(&z.z2().norm_sq()).ln();
            let pi_phi = z.z2().arg_f64();
            let d = 2.0 / (1.0 + log_m * log_m + pi_phi * pi_phi).sqrt();
            ensure(n.count_ones() == 1 && d < eps, || format!("chordal distance {d} at eps {eps}"))?;
        }
    }

    let universe = enumerate_universe(&small_universe()).map_err(|e| e.to_string())?;
    let inf = Region::points(PointSet::infinity());
    for i in 0..9 {
        let z = random_charge_in(&mut rng, REGIMES[i % 3], 8);
        ensure(semistable_in_region(&z, &inf, &universe).is_none(), || {
            format!("semistable object at infinity under {z}")
        })?;
    }

    let mut doubled = 0;
    while doubled < 1000 {
        let z = random_charge_in(&mut rng, REGIMES[doubled % 3], 8);
        let x = ObjectExpr::summand(random_indec(&mut rng), rng.gen_range(-1..=1), rng.gen_range(1u32..4));
        if !is_semistable(&z, &x).unwrap() {
            continue;
        }
        doubled += 1;
        let expected = charge_eval(&z, &x.heart_class()).norm_sq() * BigInt::from(4);
        let img = ztilde(&z, &x.direct_sum(&x));
        ensure(img.len() == 1 && finite_mass_sq(&img.points()[0]) == Some(&expected), || {
            format!("doubling fails for {x} under {z}")
        })?;
    }
    Ok("1000 union-law pairs, eps 0.1/0.01 witnesses for 20 charges, infinity region empty, 1000 doublings".into())
}

fn twist_coherence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let w = rng.gen_range(-10i64..=10);
        let (s1, s2) = heart_generators(w);
        let mut x = ObjectExpr::zero();
        for _ in 0..rng.gen_range(1..4) {
            let g = if rng.gen_bool(0.5) { &s1 } else { &s2 };
            x = x.direct_sum(&g.shift(rng.gen_range(-3..=3)).power(&rng.gen_range(1u32..5).into()));
        }
        let s = KClassCY::line_bundle(w - 1);
        let lhs = cy_class(&twist_obj(w, &x).map_err(|e| e.to_string())?);
        let rhs = twist_k(&s, &cy_class(&x)).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("w={w}, {x}: {lhs} vs {rhs}"))?;

        let n = rng.gen_range(-100i64..=100);
        let s = KClassCY::line_bundle(n);
        let f = KClassCY::new(rng.gen_range(-10_000i64..=10_000), rng.gen_range(-10_000i64..=10_000));
        let g = KClassCY::new(rng.gen_range(-10_000i64..=10_000), rng.gen_range(-10_000i64..=10_000));
        let tf = twist_k(&s, &f).unwrap();
        let tg = twist_k(&s, &g).unwrap();
        ensure(twist_k(&s, &tf).unwrap() == f, || format!("twist along {s} not an involution on {f}"))?;
        ensure(euler_cy(&tf, &tg) == euler_cy(&f, &g), || format!("euler form not preserved for {f}, {g}"))?;
    }
    Ok("1000 objects in the twist domain, 1000 class pairs".into())
}

fn random_expression(rng: &mut ChaCha8Rng) -> ObjectExpr {
    let points = [
        ProjPoint::affine(0),
        ProjPoint::Infinity,
        ProjPoint::Affine(q_frac(rng.gen_range(-9..=9), rng.gen_range(1..=9))),
    ];
    let mut x = ObjectExpr::zero();
    for _ in 0..rng.gen_range(0..5) {
        let indec = match rng.gen_range(0..3) {
            0 => Indec::Preproj(rng.gen_range(0..7)),
            1 => Indec::Preinj(rng.gen_range(0..7)),
            _ => Indec::Regular(points[rng.gen_range(0..3)].clone(), rng.gen_range(1..5)),
        };
        x.add_summand(Summand::new(indec, rng.gen_range(-3..=3)), rng.gen_range(1u32..6).into());
    }
    x
}

fn stabtop_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stabtop"))
}

fn schema_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"))
}

fn validate(name: &str, doc: &Value) -> Result<(), String> {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(name)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    ensure(errors.is_empty(), || format!("{name}: {}", first_few(&errors)))
}

fn run_json(args: &[&str]) -> Result<(i32, Value), String> {
    let out = stabtop_bin().args(args).output().map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let doc = serde_json::from_slice(&out.stdout)
        .map_err(|e| format!("{args:?} exit {code}: {e}; stderr {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok((code, doc))
}

fn cli_contract() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let dir = std::env::temp_dir().join(format!("stabtop-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("config.json");
    std::fs::write(
        &cfg,
        r#"{"charge":{"z1":{"re":"-1","im":"1/2"},"z2":{"re":"1/3","im":"1"}},"model":"localP1","w":1,
            "bounds":{"max_d1":3,"max_d2":3,"shifts":[-1,1],"points":["[1:0]","[1:1]","[0:1]"]},"seed":42}"#,
    )
    .map_err(|e| e.to_string())?;
    let cfg = cfg.to_str().unwrap().to_string();

    for _ in 0..500 {
        let x = random_expression(&mut rng);
        let text = format_object(&x);
        let back = parse_object(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == x && format_object(&back) == text, || format!("round trip of {text}"))?;
    }
    let mut via_binary = 0;
    for _ in 0..50 {
        let text = format_object(&random_expression(&mut rng));
        let (code, doc) = run_json(&["-c", &cfg, "ztilde", &text])?;
        ensure(code == 0 && doc["object"] == text.clone(), || format!("binary echo of {text}"))?;
        validate("ztilde", &doc)?;
        via_binary += 1;
    }

    let (code, doc) = run_json(&["-c", &cfg, "check-props", "--oracle"])?;
    ensure(code == 0, || format!("clean check-props exit {code}: {doc}"))?;
    validate("check-props", &doc)?;
    let (code, doc) = run_json(&["-c", &cfg, "check-props", "--oracle", "--corrupt-hom-cell"])?;
    ensure(code == 1, || format!("mutated check-props exit {code}"))?;
    validate("check-props", &doc)?;

    let objects = dir.join("objects.txt");
    let universe = enumerate_universe(&UniverseBounds::new(2, 2, (0, 0), ProjPoint::over_prime(2)))
        .map_err(|e| e.to_string())?;
    let listing: Vec<String> = universe.iter().take(100).map(ToString::to_string).collect();
    std::fs::write(&objects, listing.join("\n")).map_err(|e| e.to_string())?;
    let svg = dir.join("plot.svg");
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("hn", vec!["hn", "P(1) + R([1:1],2)[1]"]),
        ("ztilde", vec!["ztilde", "0"]),
        ("fiber", vec!["fiber", "R([1:0],1)"]),
        ("jh", vec!["jh", "R([1:0],2)"]),
        ("sequiv", vec!["sequiv", "R([1:0],2)", "R([1:0],1)^2"]),
        ("faithful-check", vec!["faithful-check"]),
        ("sample-faithful", vec!["sample-faithful", "--count", "200", "--grid", "20", "--seed", "3"]),
        ("twist", vec!["twist", "O(0)[2] + O(1)"]),
        ("twist", vec!["twist", "--inverse", "O(-1)"]),
        ("plot", vec!["plot", objects.to_str().unwrap(), "--out", svg.to_str().unwrap()]),
    ];
    for (schema, args) in &commands {
        let mut full = vec!["-c", cfg.as_str()];
        full.extend(args.iter().copied());
        let (code, doc) = run_json(&full)?;
        ensure(code == 0, || format!("{args:?} exit {code}"))?;
        validate(schema, &doc)?;
    }
    let config: Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    validate("config", &config)?;
    let drawn = std::fs::read_to_string(&svg).map_err(|e| e.to_string())?;
    ensure(drawn.contains("version=\"1.1\"") && drawn.trim_end().ends_with("</svg>"), || "malformed svg".into())?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "500 in-process and {via_binary} binary round trips, mutation exits 1, {} command outputs schema-valid",
        commands.len() + 3 + via_binary
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("oracle-engine HN equivalence", oracle_hn_equivalence),
        ("Hom/Ext soundness", hom_soundness),
        ("CY constants and Euler parity", paper_constants),
        ("faithfulness", faithfulness),
        ("proportionality of same-phase semistables", proportionality),
        ("fiber corollaries", fiber_corollaries),
        ("point-object and spherical-factor fibers", point_propositions),
        ("connectedness ingredients", connectedness),
        ("twist coherence", twist_coherence),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
