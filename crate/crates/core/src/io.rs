//! Canonical JSON and CSV writers.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::dynamics::Trajectory;
use crate::regions::RegionMap;

/// Serializes with sorted keys, floats as `{:.16e}` (17 significant digits),
/// integers verbatim and non-finite numbers as `null`.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

/// Re-emits a JSON document canonically.
pub fn canonicalize(text: &str) -> serde_json::Result<String> {
    let v: Value = serde_json::from_str(text)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                match n.as_f64() {
                    Some(f) if f.is_finite() => out.push_str(&format!("{f:.16e}")),
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(&m[k], out);
            }
            out.push('}');
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// Columns `t, x, sigma, delta, xdot, sigmadot, deltadot, energy`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "x", "sigma", "delta", "xdot", "sigmadot", "deltadot", "energy"])?;
    for ((t, s), e) in traj.times.iter().zip(&traj.states).zip(&traj.energies) {
        let a = s.to_array();
        let mut row = vec![sci(*t)];
        row.extend(a.iter().map(|v| sci(*v)));
        row.push(sci(*e));
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "na",
    }
}

/// One row per node, Y outer and X inner.
pub fn write_region_csv<W: Write>(map: &RegionMap, w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "X",
        "Y",
        "zone",
        "conic1",
        "conic2",
        "conic3",
        "conic4",
        "condA",
        "condB",
        "inA",
        "semicircle",
        "refined",
        "rho_m_over_omega",
        "rho_M_over_omega",
    ])?;
    for (iy, y) in map.ys.iter().enumerate() {
        for (ix, x) in map.xs.iter().enumerate() {
            let c = map.cell(ix, iy);
            let a = c.antiphase;
            let mut row = vec![sci(*x), sci(*y), c.zone.label().to_string()];
            row.extend(c.conics.iter().map(|b| b.to_string()));
            row.push(opt_bool(a.map(|a| a.cond_a)).into());
            row.push(opt_bool(a.map(|a| a.cond_b)).into());
            row.push(opt_bool(a.map(|a| a.in_a_set)).into());
            row.push(opt_bool(c.semicircle).into());
            row.push(c.refined.map_or("na", |r| r.label()).into());
            row.push(sci(c.rho_m));
            row.push(sci(c.rho_big));
            wr.write_record(&row)?;
        }
    }
    wr.flush()?;
    Ok(())
}
