//! Browser bindings. Every export takes plain numbers or a `mu:weight,...`
//! measure string and returns a JSON document, or an error message.

use exchangeable_car::car::CarContext;
use exchangeable_car::commutant::SymmetricProjector;
use exchangeable_car::definetti::{
    classify_type, eigenvalue_ratio_spectrum, reconstruct_state, recover_measure, MixingMeasure,
    DEFAULT_GRID,
};
use exchangeable_car::states::weak_clustering_average;
use exchangeable_car::{Error, ModeCount, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest mode count for the clustering curve, which builds dense states.
pub const MAX_CURVE_MODES: usize = 7;
/// Largest moment order for recovery from an input measure.
pub const MAX_RECOVERY_ORDER: usize = 24;
pub const RECOVERY_TOL: f64 = 1e-8;

fn capacity(what: &'static str, limit: usize, got: usize) -> Error {
    Error::Capacity {
        what,
        limit,
        got,
        hint: "",
    }
}

fn atoms_json(measure: &MixingMeasure) -> Value {
    measure
        .atoms()
        .iter()
        .map(|a| json!({ "mu": a.mu, "weight": a.weight }))
        .collect()
}

/// Factor type of `φ_μ` and the eigenvalue ratios of its density on `n` modes.
pub fn classify_json(mu: f64, n: usize) -> Result<Value> {
    let t = classify_type(mu)?;
    let spectrum = match eigenvalue_ratio_spectrum(mu, ModeCount::new(n)?) {
        Ok(s) => json!({ "eigenvalues": s.eigenvalues, "ratios": s.ratios }),
        Err(Error::Degenerate(msg)) => json!({ "eigenvalues": [1.0], "ratios": [], "note": msg }),
        Err(e) => return Err(e),
    };
    Ok(json!({
        "mu": mu,
        "n_modes": n,
        "type": t.tag(),
        "label": t.to_string(),
        "lambda": t.lambda(),
        "spectrum": spectrum,
    }))
}

/// Symmetrized average `φ(S(e_11(1)) e_11(1))` of the mixture state on
/// `1..=n_max` modes, next to its closed form and both candidate limits.
pub fn clustering_curve_json(measure: &str, n_max: usize) -> Result<Value> {
    if n_max > MAX_CURVE_MODES {
        return Err(capacity("clustering curve modes", MAX_CURVE_MODES, n_max));
    }
    let nu: MixingMeasure = measure.parse()?;
    let m = nu.moments(2);
    let (m1, m2) = (m.as_slice()[1], m.as_slice()[2]);
    let rows = (1..=n_max)
        .map(|n| {
            let modes = ModeCount::new(n)?;
            let ctx = CarContext::new(modes);
            let phi = reconstruct_state(&nu, modes)?;
            let e11 = ctx.matrix_unit(1, 1, 1)?;
            let average =
                weak_clustering_average(&phi, &SymmetricProjector::new(modes), &e11, &e11)?;
            Ok(json!({
                "n": n,
                "average": average.re,
                "formula": m2 + (m1 - m2) / n as f64,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "measure": atoms_json(&nu),
        "rows": rows,
        "limit": m2,
        "product_of_expectations": m1 * m1,
    }))
}

/// Recovers a measure from the first `order` moments of the input measure.
pub fn recovery_json(measure: &str, order: usize) -> Result<Value> {
    if order > MAX_RECOVERY_ORDER {
        return Err(capacity("recovery moment order", MAX_RECOVERY_ORDER, order));
    }
    if order == 0 {
        return Err(Error::Domain("moment order must be positive".into()));
    }
    let nu: MixingMeasure = measure.parse()?;
    let moments = nu.moments(order);
    let rec = recover_measure(&moments, DEFAULT_GRID, RECOVERY_TOL)?;
    Ok(json!({
        "input": atoms_json(&nu),
        "recovered": atoms_json(&rec.measure),
        "moments": moments.as_slice(),
        "residual": rec.residual,
        "levy_distance": nu.levy_distance(&rec.measure),
    }))
}

fn export(r: Result<Value>) -> std::result::Result<String, String> {
    r.map(|v| v.to_string()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn classify(mu: f64, n: usize) -> std::result::Result<String, String> {
    export(classify_json(mu, n))
}

#[wasm_bindgen]
pub fn clustering_curve(measure: &str, n_max: usize) -> std::result::Result<String, String> {
    export(clustering_curve_json(measure, n_max))
}

#[wasm_bindgen]
pub fn recover(measure: &str, order: usize) -> std::result::Result<String, String> {
    export(recovery_json(measure, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_reports_lambda() {
        let v = classify_json(0.2, 4).unwrap();
        assert_eq!(v["type"], "III_lambda");
        assert!((v["lambda"].as_f64().unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(classify_json(0.5, 3).unwrap()["type"], "II_1");
        assert_eq!(
            classify_json(0.0, 3).unwrap()["spectrum"]["eigenvalues"][0],
            1.0
        );
    }

    #[test]
    fn exports_turn_errors_into_messages() {
        assert!(classify(2.0, 3).unwrap_err().contains("not in [0, 1]"));
        assert!(clustering_curve("0.5:1", 9)
            .unwrap_err()
            .contains("capacity"));
        assert!(recover("oops", 4).is_err());
        assert!(recover("0.5:1", 0).is_err());
    }
}
