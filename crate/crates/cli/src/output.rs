//! CSV and JSON writers. Every float is printed with 17 significant digits
//! so that values round-trip exactly.

use std::fmt::Write;

use waveguide_core::{IntegrationReport, IntensityMap};

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per `(z, j)`: `z,j,re,im,intensity`.
pub fn map_csv(map: &IntensityMap) -> String {
    let mut out = String::from("z,j,re,im,intensity\n");
    for s in &map.snapshots {
        for (j, a) in s.sites().zip(&s.amplitudes) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                num(s.z),
                j,
                num(a.re),
                num(a.im),
                num(a.norm_sqr())
            );
        }
    }
    out
}

fn array(values: impl Iterator<Item = f64>) -> String {
    let items: Vec<String> = values.map(num).collect();
    format!("[{}]", items.join(", "))
}

pub fn map_json(name: &str, map: &IntensityMap) -> String {
    let (j_min, j_max) = map
        .snapshots
        .first()
        .map_or((0, -1), |s| (s.j_min, s.j_max));
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"name\": {},", serde_json::Value::from(name));
    let _ = writeln!(out, "  \"j_min\": {j_min},");
    let _ = writeln!(out, "  \"j_max\": {j_max},");
    let _ = writeln!(out, "  \"snapshots\": [");
    for (k, s) in map.snapshots.iter().enumerate() {
        let sep = if k + 1 == map.snapshots.len() {
            ""
        } else {
            ","
        };
        let _ = writeln!(out, "    {{");
        let _ = writeln!(out, "      \"z\": {},", num(s.z));
        let _ = writeln!(
            out,
            "      \"re\": {},",
            array(s.amplitudes.iter().map(|a| a.re))
        );
        let _ = writeln!(
            out,
            "      \"im\": {},",
            array(s.amplitudes.iter().map(|a| a.im))
        );
        let _ = writeln!(
            out,
            "      \"intensity\": {}",
            array(s.amplitudes.iter().map(|a| a.norm_sqr()))
        );
        let _ = writeln!(out, "    }}{sep}");
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

pub fn report_json(name: &str, r: &IntegrationReport, tolerance: f64, passed: bool) -> String {
    format!(
        "{{\n  \"name\": {},\n  \"max_abs_error\": {},\n  \"at_site\": {},\n  \"at_z\": {},\n  \
         \"norm_drift\": {},\n  \"steps\": {},\n  \"tolerance\": {},\n  \"passed\": {}\n}}\n",
        serde_json::Value::from(name),
        num(r.max_abs_error),
        r.at_site,
        num(r.at_z),
        num(r.norm_drift),
        r.steps,
        num(tolerance),
        passed
    )
}
