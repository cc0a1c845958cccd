//! JSON envelopes. Keys come out sorted and floats carry 17 significant
//! digits, so identical runs give byte-identical output.

use std::str::FromStr;

use beurling::{certify, crosscheck, inner, maps, numeric, orbits, poly, series};
use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(
            if x.is_nan() {
                "nan"
            } else if x > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .into(),
        );
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is a JSON number"))
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn opt_complex(z: Option<Complex64>) -> Value {
    z.map_or(Value::Null, complex)
}

/// CSV field with the same precision as the JSON numbers.
pub fn csv_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Every tolerance and fixed parameter the commands depend on.
pub fn tolerance_table() -> Value {
    let mut t = Map::new();
    let mut put = |k: &str, v: Value| {
        t.insert(k.to_string(), v);
    };
    put("atom_merge", num(inner::ATOM_MERGE_TOL));
    put("boundary", num(maps::BOUNDARY_TOL));
    put("boundary_samples", json!(maps::BOUNDARY_SAMPLES));
    put("constancy", num(certify::CONSTANCY_TOL));
    put("constancy_points", json!(certify::CONSTANCY_POINTS));
    put("default_angles", json!(certify::DEFAULT_ANGLES));
    put("default_margin", num(certify::DEFAULT_MARGIN));
    put(
        "default_radii",
        Value::Array(certify::DEFAULT_RADII.iter().map(|&r| num(r)).collect()),
    );
    put("eval", num(inner::DEFAULT_EVAL_TOL));
    put("exclusion_radius", num(certify::EXCLUSION_RADIUS));
    put("forward_invariance", num(orbits::FORWARD_INVARIANCE_TOL));
    put("identity", num(maps::IDENTITY_TOL));
    put("kernel_norm_slack", num(crosscheck::KERNEL_NORM_SLACK));
    put("kernel_radius", num(crosscheck::KERNEL_RADIUS));
    put("kernel_set_sizes", json!(crosscheck::KERNEL_SET_SIZES));
    put("littlewood_slack", num(series::LITTLEWOOD_SLACK));
    put("max_gram_condition", num(series::MAX_GRAM_CONDITION));
    put("min_point_separation", num(series::MIN_POINT_SEPARATION));
    put("oracle_member", num(series::ORACLE_MEMBER_TOL));
    put("oracle_n", json!(series::DEFAULT_ORACLE_N));
    put("oracle_non_member", num(series::ORACLE_NON_MEMBER_TOL));
    put("orbit_formula", num(orbits::FORMULA_TOL));
    put("pole", num(maps::POLE_TOL));
    put("probes", json!(series::DEFAULT_PROBES));
    put("ridge", num(series::DEFAULT_RIDGE));
    put("root_cluster", num(poly::ROOT_CLUSTER_TOL));
    put("root_merge", num(maps::ROOT_MERGE_TOL));
    put("seed", json!(numeric::SEED));
    put("self_map", num(maps::SELF_MAP_TOL));
    put("transport", num(certify::TRANSPORT_TOL));
    put("zero_merge", num(inner::ZERO_MERGE_TOL));
    Value::Object(t)
}

pub fn envelope(command: &str, inputs: Value, result: Value) -> Value {
    json!({
        "command": command,
        "inputs": inputs,
        "result": result,
        "tolerance_table": tolerance_table(),
        "version": VERSION,
    })
}
