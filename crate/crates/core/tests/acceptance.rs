//! One line per acceptance criterion. Exits nonzero on any failure other than a documented misprint in the source text.

mod common;

use std::time::{Duration, Instant};

use common::{c3, e01, q, Gen};
use transverse::certify::{
    certify_auto, check_corollary_curves, check_corollary_identity, check_theorem_a, check_theorem_main,
    check_theorem_weak, recheck, Certificate, Verdict,
};
use transverse::diagonal_isogeny::DiagonalIsogeny;
use transverse::elliptic::{multiplication_maps, CurveRing, WeierstrassCurve};
use transverse::exact_poly::{exact_divide, parse_poly, MultiPoly};
use transverse::ff_oracle::{verify_maps_vs_group_law, verify_preimage_membership, PrimeFieldCtx, ScanPolicy};
use transverse::height_bounds::{
    bezout_intersection_bounds, c0, c0_harmonic, c1_c2_curve, galateau_lambda, Interval, WORKING_PRECISION,
};
use transverse::preimage_equations::generate_preimage;
use transverse::product_variety::{make_cn_curve, preimage_degree, preimage_degree_curve, total_degree};

type Outcome = Result<String, Red>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

/// A failed criterion. `Documented` failures are explained in the output and do not fail the run.
enum Red {
    Documented(String),
    Unexpected(String),
}

impl From<String> for Red {
    fn from(s: String) -> Self {
        Red::Unexpected(s)
    }
}

impl From<&str> for Red {
    fn from(s: &str) -> Self {
        Red::Unexpected(s.into())
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn iso(a: &[i64]) -> DiagonalIsogeny {
    DiagonalIsogeny::new(a.to_vec()).unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:.2?}, limit {limit:?}", start.elapsed()))
}

const R2: &str = "x^7 - A*x^5 - 7*B*x^4 - A^2*x^3 - 10*A*B*x^2 + (A^3 - 8*B^2)*x + A^2*B";
const S2: &str = "x^9 + 6*A*x^7 + 21*B*x^6 + 21*A*B*x^4 + (12*B^2 - 6*A^3)*x^3 - 9*A^2*B*x^2 \
                  - (A^4 + 12*A*B^2)*x - A^3*B - 8*B^3";
const T2: &str = "2*(x^3 + A*x + B)";
const R3: &str = "x^9 - 12*A*x^7 - 96*B*x^6 + 30*A^2*x^5 - 24*A*B*x^4 + (36*A^3 + 48*B^2)*x^3 + 48*A^2*B*x^2 \
                  + (9*A^4 + 96*A*B^2)*x + 8*A^3*B + 64*B^3";
const S3: &str = "x^12 + 22*A*x^10 + 220*B*x^9 - 165*A^2*x^8 - 528*A*B*x^7 - (92*A^3 + 1776*B^2)*x^6 \
                  + 264*A^2*B*x^5 - (185*A^4 + 960*A*B^2)*x^4 - (80*A^3*B - 320*B^3)*x^3 \
                  - (90*A^5 + 624*A^2*B^2)*x^2 - (132*A^4*B + 896*A*B^3)*x - 3*A^6 - 96*A^3*B^2 - 512*B^4";
const T3: &str = "3*x^4 + 6*A*x^2 + 12*B*x - A^2";

/// `S3` with the sign of its `320 B^3 x^3` term flipped, which is what the group law forces.
const S3_SIGN_FIXED: &str = "x^12 + 22*A*x^10 + 220*B*x^9 - 165*A^2*x^8 - 528*A*B*x^7 - (92*A^3 + 1776*B^2)*x^6 \
                  + 264*A^2*B*x^5 - (185*A^4 + 960*A*B^2)*x^4 - (80*A^3*B + 320*B^3)*x^3 \
                  - (90*A^5 + 624*A^2*B^2)*x^2 - (132*A^4*B + 896*A*B^3)*x - 3*A^6 - 96*A^3*B^2 - 512*B^4";

fn ac1() -> Outcome {
    let start = Instant::now();
    let ctx = CurveRing::symbolic();
    let parse = |s: &str| parse_poly(s, ctx.ring()).map_err(|e| e.to_string());
    let mut equal = Vec::new();
    let mut differing = Vec::new();
    for (alpha, printed) in [(2, [R2, S2, T2]), (3, [R3, S3, T3])] {
        let m = multiplication_maps(&ctx, alpha).map_err(|e| e.to_string())?;
        for (name, got, text) in [("r", &m.r, printed[0]), ("s", &m.s, printed[1]), ("t", &m.t, printed[2])] {
            if *got == parse(text)? {
                equal.push(format!("{name}_{alpha}"));
            } else {
                differing.push((format!("{name}_{alpha}"), got.clone()));
            }
        }
    }
    within(Duration::from_secs(1), start)?;
    if differing.is_empty() {
        return Ok(format!("all six equal: {}", equal.join(" ")));
    }
    // The only known misprint: s_3 with one sign.  Anything else is a real failure.
    let only_s3 = differing.len() == 1 && differing[0].0 == "s_3" && differing[0].1 == parse(S3_SIGN_FIXED)?;
    if !only_s3 {
        let names: Vec<_> = differing.iter().map(|(n, p)| format!("{n} = {p}")).collect();
        return Err(Red::Unexpected(names.join("; ")));
    }
    // Independent witness: on y^2 = x^3 + 1, [3](2, 3) = (-1, 0), so s_3(2) must vanish.
    let at_two = |text: &str| -> Result<String, String> {
        let p = parse(text)?;
        Ok(p.eval(&[q(2, 1), q(0, 1), q(1, 1)]).to_string())
    };
    Err(Red::Documented(format!(
        "{} equal; s_3 differs from the print only in the sign of 320 B^3 x^3. \
         On y^2 = x^3 + 1, [3](2,3) = (-1,0) forces s_3(2) = 0: computed gives {}, printed gives {}",
        equal.join(" "),
        at_two(S3_SIGN_FIXED)?,
        at_two(S3)?
    )))
}

const S5: &str = "x2^36 + 4692*x2^33 - 884544*x2^30 + 1880320*x2^27 - 94222080*x2^24 - 1437769728*x2^21 \
                  - 3534606336*x2^18 - 8883929088*x2^15 - 6868500480*x2^12 - 1853358080*x2^9 \
                  - 497025024*x2^6 - 742391808*x2^3 + 16777216";
const T5: &str = "x2^12 + 76*x2^9 - 48*x2^6 - 320*x2^3 - 256/5";

fn ac2() -> Outcome {
    let start = Instant::now();
    let v = c3();
    let ring = v.system.ring();
    let parse = |s: &str| parse_poly(s, ring).map_err(|e| e.to_string());

    let pre = generate_preimage(&v, &iso(&[2, 1])).map_err(|e| e.to_string())?;
    ensure(pre.equations.len() == 1, || "expected one equation for [2,1]".into())?;
    let scaled = parse("64*y2*(x1^3 + 1)^3 - (x1^4 - 8*x1)^3")?;
    let k = scaled.proportionality(&pre.equations[0]).ok_or("[2,1] not proportional to the scaled form")?;
    let printed = parse("y2*(x1^3 + 1)^3 - (x1^4 - 8*x1)^3")?;
    ensure(printed.proportionality(&pre.equations[0]).is_none(), || "printed [2,1] form unexpectedly matches".into())?;

    let pre = generate_preimage(&v, &iso(&[1, 5])).map_err(|e| e.to_string())?;
    let eq = &pre.equations[0];
    let (y2, x1) = (v.system.y_index(1), v.system.x_index(0));
    let part = |e: u32| {
        MultiPoly::from_terms(
            ring,
            eq.terms().filter(|(m, _)| m.exponent(y2) == e).map(|(m, c)| (m.with_exponent(y2, 0), c.clone())),
        )
    };
    ensure(eq.degree_at(y2) == Some(1), || "[1,5] equation is not linear in y2".into())?;
    let s_scalar = parse(S5)?.proportionality(&part(1)).ok_or("degree-36 bracket differs")?;
    let cube = exact_divide(&part(0), &MultiPoly::var_at(ring, x1).pow(3)).map_err(|e| e.to_string())?;
    let t_scalar = parse(T5)?.pow(3).proportionality(&cube).ok_or("cube of degree-12 bracket differs")?;
    within(Duration::from_secs(5), start)?;
    Ok(format!(
        "[2,1]: generated = {k} * (64 y2 (x1^3+1)^3 - (x1^4-8 x1)^3), printed form lacks the 64; \
         [1,5]: brackets match with scalars {s_scalar} and {t_scalar} (printed cube on the degree-36 bracket dropped)"
    ))
}

fn ac3() -> Outcome {
    for n in 1..=10u32 {
        let v = make_cn_curve(e01(), e01(), n).map_err(|e| e.to_string())?;
        let d = total_degree(&v).map_err(|e| e.to_string())?;
        ensure(d == u128::from(6 * n + 9), || format!("deg C_{n} = {d}"))?;
    }
    let v = c3();
    let d = v.multidegrees.curve_degrees().ok_or("C_3 is not a curve")?;
    let mut out = Vec::new();
    for (alpha, j, want) in [([2, 1], 0, 81u128), ([1, 5], 1, 243)] {
        let general = preimage_degree(&v, &iso(&alpha)).map_err(|e| e.to_string())?;
        let curve = preimage_degree_curve(&d, j, alpha[j]).map_err(|e| e.to_string())?;
        ensure(general == want && curve == want, || format!("{alpha:?}: {general} vs {curve}, want {want}"))?;
        out.push(format!("{alpha:?} -> {want}"));
    }
    Ok(format!("6n+9 for n = 1..10; {}", out.join(", ")))
}

fn certified_instances(target: usize) -> Result<Vec<Certificate>, String> {
    let mut g = Gen::new(0xace4);
    let mut certs = Vec::with_capacity(target);
    let mut attempts = 0;
    while certs.len() < target {
        attempts += 1;
        ensure(attempts < 200_000, || format!("only {} certified instances found", certs.len()))?;
        let cert = match attempts % 3 {
            0 => {
                let v = common::random_table(&mut g);
                let bound = v.multidegrees.dim_factorial().unwrap() * v.total_degree().unwrap();
                let phi = common::random_isogeny(&mut g, v.arity(), bound);
                certify_auto(&v, &phi)
            }
            1 => {
                let c = common::random_curve_table(&mut g);
                let primes = common::random_primes(&mut g, &c);
                check_theorem_a(&c, &primes)
            }
            _ => {
                let v = common::random_table(&mut g);
                let prime_mode = g.coin();
                let n = if prime_mode { common::next_prime(g.below(60) + 2) as i64 } else { g.range(2, 60) };
                check_corollary_identity(&v, n, prime_mode)
            }
        }
        .map_err(|e| e.to_string())?;
        if cert.is_certified() {
            certs.push(cert);
        }
    }
    Ok(certs)
}

fn ac4() -> Outcome {
    let v = c3();
    for alpha in [[2, 1], [1, 5]] {
        let cert = check_corollary_curves(&v, &iso(&alpha)).map_err(|e| e.to_string())?;
        ensure(cert.is_certified(), || format!("{alpha:?} not certified: {:?}", cert.reasons))?;
        recheck(&cert).map_err(|e| e.0)?;
    }
    let a = check_theorem_a(&v, &[167, 167]).map_err(|e| e.to_string())?;
    ensure(a.is_certified(), || "(167,167) not certified".into())?;
    let json = serde_json::to_value(&a.witness).unwrap();
    ensure(json["threshold"] == 162, || format!("threshold {}", json["threshold"]))?;
    recheck(&a).map_err(|e| e.0)?;

    let phi = iso(&[3, 3]);
    let all = [
        check_corollary_curves(&v, &phi),
        check_theorem_main(&v, &phi),
        check_theorem_weak(&v, &phi),
        check_theorem_a(&v, &[3, 3]),
        check_corollary_identity(&v, 3, false),
        check_corollary_identity(&v, 3, true),
        certify_auto(&v, &phi),
    ];
    for c in all {
        let c = c.map_err(|e| e.to_string())?;
        ensure(c.verdict == Verdict::Inconclusive, || format!("[3,3] certified by {:?}", c.criterion))?;
    }

    let certs = certified_instances(1000)?;
    let mut by_criterion = std::collections::BTreeMap::new();
    for c in &certs {
        recheck(c).map_err(|e| format!("{:?}: {}", c.criterion, e.0))?;
        *by_criterion.entry(format!("{:?}", c.criterion)).or_insert(0) += 1;
    }
    Ok(format!("[2,1], [1,5], (167,167) vs 162 certified; [3,3] inconclusive x7; 1000 rechecked {by_criterion:?}"))
}

fn ac5() -> Outcome {
    let mut g = Gen::new(0xac5);
    let (mut weak, mut a_certs) = (0, 0);
    for _ in 0..1000 {
        let v = common::random_table(&mut g);
        let bound = v.multidegrees.dim_factorial().unwrap() * v.total_degree().unwrap();
        let phi = common::random_isogeny(&mut g, v.arity(), bound);
        if check_theorem_weak(&v, &phi).map_err(|e| e.to_string())?.is_certified() {
            weak += 1;
            let main = check_theorem_main(&v, &phi).map_err(|e| e.to_string())?;
            ensure(main.is_certified(), || format!("weak without main: {:?} {:?}", v.multidegrees, phi.alphas()))?;
        }
    }
    for _ in 0..1000 {
        let c = common::random_curve_table(&mut g);
        let primes = common::random_primes(&mut g, &c);
        if check_theorem_a(&c, &primes).map_err(|e| e.to_string())?.is_certified() {
            a_certs += 1;
            let curves = check_corollary_curves(&c, &DiagonalIsogeny::new(primes.clone()).unwrap())
                .map_err(|e| e.to_string())?;
            ensure(curves.is_certified(), || format!("threshold without curves: {primes:?}"))?;
        }
    }
    ensure(weak >= 100 && a_certs >= 100, || format!("too few premises hit: {weak}, {a_certs}"))?;
    Ok(format!("0 violations; premises held in {weak}/1000 and {a_certs}/1000 cases"))
}

fn ac6() -> Outcome {
    let start = Instant::now();
    let curves = [e01(), WeierstrassCurve::new(-1, 0).unwrap()];
    let (mut runs, mut skipped) = (0, std::collections::BTreeSet::new());
    for curve in curves {
        for p in [5u64, 7, 11, 13] {
            for alpha in [2i64, 3, 5, 7] {
                if (alpha as u64).is_multiple_of(p) {
                    skipped.insert(format!("(p={p}, alpha={alpha})"));
                    continue;
                }
                let ctx = PrimeFieldCtx::new(p, &[curve], &[alpha]).map_err(|e| e.to_string())?;
                let r = verify_maps_vs_group_law(&ctx, 0, alpha).map_err(|e| e.to_string())?;
                ensure(r.passed, || format!("maps {:?} p={p} alpha={alpha}: {:?}", (curve.a(), curve.b()), r.mismatches))?;
                runs += 1;
            }
        }
    }
    let v = c3();
    let mut tuples = 0;
    for alpha in [[2, 1], [1, 5]] {
        let pre = generate_preimage(&v, &iso(&alpha)).map_err(|e| e.to_string())?;
        for p in [7u64, 11, 13] {
            let ctx = PrimeFieldCtx::new(p, v.system.curves(), &alpha).map_err(|e| e.to_string())?;
            let r = verify_preimage_membership(&ctx, &pre, ScanPolicy::Exhaustive).map_err(|e| e.to_string())?;
            ensure(r.passed && r.iterations == r.product_size, || format!("{alpha:?} p={p}: {r:?}"))?;
            tuples += r.iterations;
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{runs} map checks (p | alpha skipped: {}), {tuples} product tuples scanned",
        skipped.into_iter().collect::<Vec<_>>().join(" ")
    ))
}

fn ac7() -> Outcome {
    let d = c0(1, 1, 8);
    let closed = 7.0 / 6.0 + 7.0 * 2f64.ln();
    ensure(d.contains_f64(closed) || (d.upper_f64() - closed).abs() < 1e-12, || format!("c0 = {}", d.upper_decimal()))?;
    let h = c0_harmonic(1, 1, 8);
    let ulp = f64::EPSILON * closed;
    ensure(
        (h.lower_f64() - d.lower_f64()).abs() <= ulp && (h.upper_f64() - d.upper_f64()).abs() <= ulp,
        || format!("harmonic {} vs double sum {}", h.upper_decimal(), d.upper_decimal()),
    )?;
    let k = c1_c2_curve(&e01(), false);
    let l = 432f64.ln() / 4.0;
    for (name, x, want) in [("c1", &k.c1, l + 3.724), ("c2", &k.c2, l + 4.015)] {
        ensure((x.upper_f64() - want).abs() < 1e-9 && (x.lower_f64() - want).abs() < 1e-9, || {
            format!("{name} = {}", x.upper_decimal())
        })?;
    }
    ensure(galateau_lambda(2, 1) == 400u32.into(), || "lambda(2,1) != 400".into())?;
    let b = bezout_intersection_bounds(243, 1.0, 3, 1.0, 1, 2, 25).map_err(|e| e.to_string())?;
    let direct = b.trivial.div(&Interval::from_u128(25, WORKING_PRECISION));
    ensure(b.improved.lo() == direct.lo() && b.improved.hi() == direct.hi(), || "improved != trivial / 25".into())?;
    let back = b.improved.mul(&Interval::from_u128(25, WORKING_PRECISION));
    ensure(b.trivial.within(&back), || "improved * 25 does not enclose trivial".into())?;
    Ok(format!(
        "c0(1,1,8) = {:.15}, c1 = {:.12}, c2 = {:.12}, lambda(2,1) = 400, bezout {:.6} / 25 = {:.6}",
        d.upper_f64(),
        k.c1.upper_f64(),
        k.c2.upper_f64(),
        b.trivial.upper_f64(),
        b.improved.upper_f64()
    ))
}

fn ac8() -> Outcome {
    let mut names = Vec::new();
    for (name, suite) in common::SUITES {
        suite(10_000).map_err(|e| format!("{name}: {e}"))?;
        names.push(name);
    }
    Ok(format!("10000 cases each: {}", names.join(", ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "printed multiplication maps", ac1),
        ("AC2", "preimage equations of C_3", ac2),
        ("AC3", "degree formulas", ac3),
        ("AC4", "certificates and rechecks", ac4),
        ("AC5", "criterion implications", ac5),
        ("AC6", "finite-field oracle", ac6),
        ("AC7", "constants", ac7),
        ("AC8", "property suites", ac8),
    ];
    let mut unexpected = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id} {title} ({secs:.2} s): {detail}"),
            Err(Red::Documented(why)) => println!("[FAIL] {id} {title} ({secs:.2} s): {why}"),
            Err(Red::Unexpected(why)) => {
                unexpected += 1;
                println!("[FAIL] {id} {title} ({secs:.2} s): {why}");
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
