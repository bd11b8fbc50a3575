//! Browser bindings. Every export returns a JSON string, with `{"error": ...}` on bad input.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use transverse::certify::certify_auto;
use transverse::diagonal_isogeny::DiagonalIsogeny;
use transverse::elliptic::WeierstrassCurve;
use transverse::ff_oracle::{enumerate_points, verify_maps_vs_group_law, FpPoint, PrimeFieldCtx};
use transverse::height_bounds::{essential_minimum_image_bounds, EssentialMinimumMode};
use transverse::preimage_equations::generate_preimage;
use transverse::product_variety::make_cn_curve;

const MAX_ALPHA: i32 = 7;
const MAX_N: u32 = 12;
const MAX_PRIME: u32 = 2000;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Preimage of `C_n: y2 = x1^n` on two copies of `y^2 = x^3 + 1` under `[a1, a2]`.
#[wasm_bindgen]
pub fn preimage_explorer(n: u32, a1: i32, a2: i32) -> String {
    respond((|| {
        if !(1..=MAX_N).contains(&n) {
            return Err(format!("n must be in 1..={MAX_N}"));
        }
        if a1.abs() > MAX_ALPHA || a2.abs() > MAX_ALPHA {
            return Err(format!("|alpha| is capped at {MAX_ALPHA} to keep the page responsive"));
        }
        let e = WeierstrassCurve::new(0, 1).map_err(err)?;
        let c = make_cn_curve(e, e, n).map_err(err)?;
        let phi = DiagonalIsogeny::new(vec![i64::from(a1), i64::from(a2)]).map_err(err)?;
        let pre = generate_preimage(&c, &phi).map_err(err)?;
        let cert = certify_auto(&c, &phi).map_err(err)?;
        Ok(json!({
            "preimage": pre.to_json().map_err(err)?,
            "verdict": cert.verdict,
            "criterion": cert.criterion,
            "reasons": cert.reasons,
        }))
    })())
}

/// Points of `y^2 = x^3 + A x + B` over `F_p` with their images under `[alpha]`.
#[wasm_bindgen]
pub fn curve_points(a: i32, b: i32, p: u32, alpha: i32) -> String {
    respond((|| {
        if p > MAX_PRIME {
            return Err(format!("p is capped at {MAX_PRIME}"));
        }
        let curve = WeierstrassCurve::new(i64::from(a), i64::from(b)).map_err(err)?;
        let alpha = i64::from(alpha);
        let ctx = PrimeFieldCtx::new(u64::from(p), &[curve], &[alpha]).map_err(err)?;
        let points = enumerate_points(&ctx, 0).map_err(err)?;
        let c = &ctx.curves[0];
        let coords = |q: FpPoint| match q {
            FpPoint::Infinity => Value::Null,
            FpPoint::Affine(x, y) => json!([x, y]),
        };
        let rows: Vec<Value> = points.iter().map(|&q| json!({ "P": coords(q), "image": coords(c.mul(alpha, q)) })).collect();
        let check = verify_maps_vs_group_law(&ctx, 0, alpha).map_err(err)?;
        Ok(json!({
            "order": points.len(),
            "points": rows,
            "maps_agree": check.passed,
            "kernel_points": check.kernel_points.len(),
            "degenerate": check.degenerate.len(),
        }))
    })())
}

/// Smart and naive essential-minimum multipliers for `alpha = 2..=alpha_max`.
#[wasm_bindgen]
pub fn essential_minimum_series(n: u32, r: u32, d_l: u32, deg_c: u32, alpha_max: u32) -> String {
    respond((|| {
        if alpha_max > 200 {
            return Err("alpha_max is capped at 200".into());
        }
        let mut rows = Vec::new();
        for alpha in 2..=i64::from(alpha_max) {
            if (alpha * alpha) < i64::from(d_l) {
                continue;
            }
            let get = |mode| {
                essential_minimum_image_bounds(n, r, u128::from(d_l), alpha, u128::from(deg_c), None, mode)
                    .map_err(err)
            };
            let (smart, naive) = (get(EssentialMinimumMode::Smart)?, get(EssentialMinimumMode::Naive)?);
            let first = |rep: &transverse::height_bounds::BoundReport| rep.values.first().map(|v| v.value);
            rows.push(json!({ "alpha": alpha, "smart": first(&smart), "naive": first(&naive) }));
        }
        Ok(json!({ "n": n, "r": r, "d_l": d_l, "deg_c": deg_c, "series": rows }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn explorer() {
        let v = parse(preimage_explorer(3, 2, 1));
        assert_eq!(v["preimage"]["total_degree"], 81);
        assert_eq!(v["verdict"], "CertifiedTransverse");
        assert!(parse(preimage_explorer(3, 9, 1))["error"].is_string());
        assert!(parse(preimage_explorer(3, 0, 1))["error"].is_string());
    }

    #[test]
    fn points() {
        let v = parse(curve_points(0, 1, 7, 3));
        assert_eq!(v["order"], 12);
        assert_eq!(v["maps_agree"], true);
        assert!(parse(curve_points(0, 1, 3, 2))["error"].is_string());
    }

    #[test]
    fn series() {
        let v = parse(essential_minimum_series(2, 2, 1, 27, 6));
        assert_eq!(v["series"].as_array().unwrap().len(), 5);
        assert!(v["series"][0]["smart"].as_f64().unwrap() > 0.0);
    }
}
