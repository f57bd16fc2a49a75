use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::experiment::{Family, Report};
use crate::error::Result;

/// Version of the CSV column layout below.
pub const CSV_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 8] =
    ["family", "d", "n", "delta_in", "dist_out", "coverage", "runtime_ms", "assertions_failed"];

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    family: Family,
    d: usize,
    n: usize,
    delta_in: String,
    dist_out: String,
    coverage: String,
    runtime_ms: String,
    assertions_failed: usize,
}

fn fixed(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.6}")
    }
}

/// Fixed-column CSV; numbers are printed with fixed precision so reruns diff cleanly.
pub fn write_csv<W: Write>(reports: &[Report], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            family: r.spec.family,
            d: r.spec.d,
            n: r.spec.n,
            delta_in: fixed(r.delta_in),
            dist_out: fixed(r.dist_out),
            coverage: fixed(r.coverage),
            runtime_ms: format!("{:.1}", r.runtime_ms),
            assertions_failed: r.assertions_failed,
        })?;
    }
    if reports.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(reports: &[Report]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Scatter plot of output distance against input defect, one colour per family.
pub fn scatter_svg(reports: &[Report]) -> String {
    let (w, h, pad) = (640.0, 440.0, 56.0);
    let pts: Vec<&Report> = reports.iter().filter(|r| r.ok && r.delta_in.is_finite() && r.dist_out.is_finite()).collect();
    let xmax = pts.iter().map(|r| r.delta_in).fold(0.0f64, f64::max).max(1e-3) * 1.1;
    let ymax = pts.iter().map(|r| r.dist_out).fold(0.0f64, f64::max).max(1e-3) * 1.1;
    let sx = |x: f64| pad + x / xmax * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - y / ymax * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{y0}" stroke="black"/>"#,
        y0 = h - pad,
        x1 = w - pad
    );
    for k in 0..=4 {
        let fx = xmax * k as f64 / 4.0;
        let fy = ymax * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{fx:.3}</text>"#, sx(fx), h - pad + 18.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{fy:.3}</text>"#, pad - 6.0, sy(fy) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">input defect δ</text>"#, w / 2.0, h - 14.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">output distance ε</text>"#,
        h / 2.0,
        h / 2.0
    );

    let mut by_family: BTreeMap<Family, Vec<&Report>> = BTreeMap::new();
    for r in pts {
        by_family.entry(r.spec.family).or_default().push(r);
    }
    for (k, (fam, rs)) in by_family.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        for r in rs {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{c}" fill-opacity="0.7"/>"#, sx(r.delta_in), sy(r.dist_out));
        }
        let ly = pad + 16.0 * k as f64;
        let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{ly:.1}" r="4" fill="{c}"/>"#, w - pad - 150.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{fam}</text>"#, w - pad - 140.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{run_specs, InstanceSpec};
    use crate::pipeline::CorrectionConfig;

    #[test]
    fn csv_is_fixed_and_deterministic() {
        let specs = vec![InstanceSpec::commuting_plus_noise(6, 2, 1, 4), InstanceSpec::permutation_pair(3, 0, 1)];
        let a = csv_string(&run_specs(&specs, &CorrectionConfig::default(), false)).unwrap();
        let b = csv_string(&run_specs(&specs, &CorrectionConfig::default(), false)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(csv_string(&[]).unwrap().trim(), CSV_COLUMNS.join(","));
    }

    #[test]
    fn svg_has_one_point_per_report() {
        let specs = vec![InstanceSpec::commuting_plus_noise(6, 2, 0, 1), InstanceSpec::commuting_plus_noise(6, 2, 1, 1)];
        let svg = scatter_svg(&run_specs(&specs, &CorrectionConfig::default(), false));
        assert!(svg.starts_with("<svg"));
        // two data points plus one legend marker
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
