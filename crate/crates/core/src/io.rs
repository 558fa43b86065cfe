//! Reproducible serialization: CSV and JSON with 17-significant-digit
//! decimals, UTF-8, LF line endings.
//!
//! 17 significant digits round-trip every f64 exactly, so re-reading a file
//! reproduces the in-memory values bit for bit; identical inputs produce
//! byte-identical files.

use crate::attractor::AttractorFamily;
use crate::dimension::{DimensionReport, ExpAttractorBuild};
use crate::error::{Error, Result};
use crate::space::{PointCloud, StateVector};
use crate::symbol::SymbolPath;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Canonical decimal form of a coefficient: 17 significant digits,
/// scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct SigDigits<'a> {
    pretty: serde_json::ser::PrettyFormatter<'a>,
}

impl serde_json::ser::Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

/// Serialize to pretty JSON with the canonical decimal form for floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let fmt = SigDigits {
        pretty: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser)?;
    let mut s = String::from_utf8(out).expect("serializer emits UTF-8");
    s.push('\n');
    Ok(s)
}

/// Write a value as canonical JSON.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

fn coeff_header(modes: usize) -> String {
    let mut h = String::new();
    for k in 1..=modes {
        if k > 1 {
            h.push(',');
        }
        let _ = write!(h, "k{k}");
    }
    h
}

/// CSV text of a point cloud: header `k1,...,km`, one row per vector.
pub fn cloud_to_csv(cloud: &PointCloud) -> Result<String> {
    if cloud.is_empty() {
        return Err(Error::EmptyInput("cloud_to_csv"));
    }
    let modes = cloud.elements[0].modes();
    let mut s = coeff_header(modes);
    s.push('\n');
    for v in &cloud.elements {
        for (i, &c) in v.coeffs.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&fmt_f64(c));
        }
        s.push('\n');
    }
    Ok(s)
}

/// Write a point cloud as CSV.
pub fn write_cloud_csv(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    fs::write(path, cloud_to_csv(cloud)?)?;
    Ok(())
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {line}: bad number {field:?}: {e}")))
}

/// Read a point cloud from CSV, labeled by the file stem.
pub fn read_cloud_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty cloud file".into()))?;
    let modes = header.split(',').count();
    let expect = coeff_header(modes);
    if header.trim() != expect {
        return Err(Error::Parse(format!(
            "bad cloud header {header:?}, want {expect:?}"
        )));
    }
    let mut elements = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let coeffs: Vec<f64> = line
            .split(',')
            .map(|f| parse_f64(f, i + 1))
            .collect::<Result<_>>()?;
        if coeffs.len() != modes {
            return Err(Error::Parse(format!(
                "line {}: {} fields, want {modes}",
                i + 1,
                coeffs.len()
            )));
        }
        elements.push(StateVector::new(coeffs));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cloud".into());
    Ok(PointCloud::new(label, elements))
}

/// CSV text of a time series: header `t,k1,...,km`.
pub fn timeseries_to_csv(times: &[f64], states: &[StateVector]) -> Result<String> {
    if times.is_empty() || times.len() != states.len() {
        return Err(Error::EmptyInput("timeseries_to_csv"));
    }
    let modes = states[0].modes();
    let mut s = format!("t,{}\n", coeff_header(modes));
    for (t, v) in times.iter().zip(states) {
        s.push_str(&fmt_f64(*t));
        for &c in &v.coeffs {
            s.push(',');
            s.push_str(&fmt_f64(c));
        }
        s.push('\n');
    }
    Ok(s)
}

/// Write a symbol path's knots as `t,k1..km` CSV.
pub fn write_symbol_csv(path: impl AsRef<Path>, symbol: &SymbolPath) -> Result<()> {
    let (times, states) = symbol.samples();
    fs::write(path, timeseries_to_csv(&times, states)?)?;
    Ok(())
}

/// Read a symbol path from `t,k1..km` CSV.
pub fn read_symbol_csv(path: impl AsRef<Path>) -> Result<SymbolPath> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty symbol file".into()))?;
    let modes = header.split(',').count().saturating_sub(1);
    if modes == 0 || header.trim() != format!("t,{}", coeff_header(modes)) {
        return Err(Error::Parse(format!("bad symbol header {header:?}")));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != modes + 1 {
            return Err(Error::Parse(format!(
                "line {}: {} fields, want {}",
                i + 1,
                fields.len(),
                modes + 1
            )));
        }
        times.push(parse_f64(fields[0], i + 1)?);
        values.push(StateVector::new(
            fields[1..]
                .iter()
                .map(|f| parse_f64(f, i + 1))
                .collect::<Result<_>>()?,
        ));
    }
    SymbolPath::from_samples(times, values)
}

#[derive(Debug, Clone, Serialize, serde::Deserialize)]
struct FamilyManifest {
    schema: u32,
    times: Vec<f64>,
    lookbacks: Vec<f64>,
    residuals: Vec<f64>,
    tolerance: f64,
    ensemble: usize,
    files: Vec<String>,
}

/// Write an attractor family as per-time CSV clouds plus a JSON manifest.
pub fn write_family(dir: impl AsRef<Path>, family: &AttractorFamily) -> Result<()> {
    family.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(family.len());
    for (i, cloud) in family.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:04}.csv");
        write_cloud_csv(dir.join(&name), cloud)?;
        files.push(name);
    }
    let manifest = FamilyManifest {
        schema: 1,
        times: family.times.clone(),
        lookbacks: family.lookbacks.clone(),
        residuals: family.residuals.clone(),
        tolerance: family.tol,
        ensemble: family.ensemble,
        files,
    };
    write_json(dir.join("manifest.json"), &manifest)
}

/// Read an attractor family written by [`write_family`].
pub fn read_family(dir: impl AsRef<Path>) -> Result<AttractorFamily> {
    let dir = dir.as_ref();
    let manifest: FamilyManifest =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let snapshots: Vec<PointCloud> = manifest
        .files
        .iter()
        .map(|f| read_cloud_csv(dir.join(f)))
        .collect::<Result<_>>()?;
    let family = AttractorFamily {
        times: manifest.times,
        snapshots,
        lookbacks: manifest.lookbacks,
        residuals: manifest.residuals,
        ensemble: manifest.ensemble,
        tol: manifest.tolerance,
    };
    family.validate()?;
    Ok(family)
}

#[derive(Debug, Clone, Serialize)]
struct BuildManifest<'a> {
    schema: u32,
    params: &'a crate::dimension::ExpAttractorParams,
    n_unit: u64,
    levels: &'a [crate::dimension::LevelRecord],
    total_members: usize,
    ledger_cap: f64,
    files: Vec<String>,
}

/// Write a discrete-attractor build: manifest JSON plus one CSV cloud per
/// accumulation level (X-projections; symbols are shifts of hull members
/// and are reproducible from the level records).
pub fn write_exp_build(dir: impl AsRef<Path>, build: &ExpAttractorBuild) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(build.e_sets.len());
    for (k, level) in build.e_sets.iter().enumerate() {
        let name = format!("level_{k:02}.csv");
        let cloud = PointCloud::new(
            format!("level_{k:02}"),
            level.iter().map(|s| s.x.clone()).collect(),
        );
        write_cloud_csv(dir.join(&name), &cloud)?;
        files.push(name);
    }
    let manifest = BuildManifest {
        schema: 1,
        params: &build.params,
        n_unit: build.n_unit,
        levels: &build.levels,
        total_members: build.total_members(),
        ledger_cap: build.ledger_cap(),
        files,
    };
    write_json(dir.join("manifest.json"), &manifest)
}

/// Write a dimension report as JSON.
pub fn write_dimension_report(path: impl AsRef<Path>, report: &DimensionReport) -> Result<()> {
    write_json(path, report)
}

/// Two-column CSV, e.g. `(-log r, log N)` plot data.
pub fn xy_csv(header: (&str, &str), rows: &[(f64, f64)]) -> String {
    let mut s = format!("{},{}\n", header.0, header.1);
    for &(x, y) in rows {
        let _ = writeln!(s, "{},{}", fmt_f64(x), fmt_f64(y));
    }
    s
}

/// Three-column CSV, e.g. `(t, dist, envelope)` plot data.
pub fn xyz_csv(header: (&str, &str, &str), rows: &[(f64, f64, f64)]) -> String {
    let mut s = format!("{},{},{}\n", header.0, header.1, header.2);
    for &(x, y, z) in rows {
        let _ = writeln!(s, "{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(z));
    }
    s
}

/// Log-log transcription of a dimension report.
pub fn dimension_loglog_csv(report: &DimensionReport) -> String {
    let rows: Vec<(f64, f64)> = report
        .radii
        .iter()
        .zip(&report.counts)
        .map(|(&r, &n)| (-r.ln(), (n as f64).ln()))
        .collect();
    xy_csv(("neg_log_r", "log_n"), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::estimate_box_dim;

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("pullback-io-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn decimal_form_roundtrips_exactly() {
        for &x in &[
            0.0,
            1.0,
            -1.0,
            (-std::f64::consts::PI * std::f64::consts::PI).exp(),
            9.885390081777927,
            f64::MIN_POSITIVE,
            1.0 / 3.0,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn cloud_csv_roundtrip_is_bit_exact() {
        let dir = tmpdir("cloud");
        let cloud = PointCloud::new(
            "c",
            vec![
                StateVector::new(vec![1.0 / 3.0, -2.0 / 7.0]),
                StateVector::new(vec![0.0, 1e-300]),
            ],
        );
        let path = dir.join("c.csv");
        write_cloud_csv(&path, &cloud).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("k1,k2\n"));
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
        let back = read_cloud_csv(&path).unwrap();
        assert_eq!(back.label, "c");
        for (a, b) in back.elements.iter().zip(&cloud.elements) {
            assert_eq!(a.coeffs, b.coeffs);
        }
        // writes are deterministic
        write_cloud_csv(dir.join("c2.csv"), &cloud).unwrap();
        assert_eq!(text, fs::read_to_string(dir.join("c2.csv")).unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn symbol_csv_roundtrip_preserves_knots() {
        let dir = tmpdir("symbol");
        let g = SymbolPath::from_samples(
            vec![-1.0, 0.0, 0.5, 2.0],
            vec![
                StateVector::new(vec![0.1, 0.2]),
                StateVector::new(vec![0.3, -0.4]),
                StateVector::new(vec![1.0 / 3.0, 0.0]),
                StateVector::new(vec![0.0, 0.0]),
            ],
        )
        .unwrap();
        let path = dir.join("g.csv");
        write_symbol_csv(&path, &g).unwrap();
        let back = read_symbol_csv(&path).unwrap();
        let (ts_a, vs_a) = g.samples();
        let (ts_b, vs_b) = back.samples();
        assert_eq!(ts_a, ts_b);
        for (a, b) in vs_a.iter().zip(vs_b) {
            assert_eq!(a.coeffs, b.coeffs);
        }
        assert!(read_symbol_csv(dir.join("missing.csv")).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn json_uses_canonical_decimals() {
        let cloud = PointCloud::new(
            "seg",
            (0..=100)
                .map(|k| StateVector::new(vec![k as f64 / 100.0]))
                .collect(),
        );
        let report = estimate_box_dim(&cloud, &[0.25, 0.125, 0.0625]).unwrap();
        let s = to_json_string(&report).unwrap();
        assert!(s.contains("\"slope\""));
        assert!(s.contains("e-1") || s.contains("e0"), "{s}");
        assert!(s.ends_with('\n'));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["slope"].as_f64().unwrap(), report.slope);
        assert_eq!(back["counts"][0].as_u64().unwrap(), report.counts[0]);
        assert_eq!(s, to_json_string(&report).unwrap());
    }

    #[test]
    fn family_roundtrip_through_directory() {
        let dir = tmpdir("family");
        let family = AttractorFamily {
            times: vec![-1.0, 0.0, 1.5],
            snapshots: (0..3)
                .map(|i| {
                    PointCloud::new(
                        format!("s{i}"),
                        vec![StateVector::new(vec![i as f64, 1.0 / 3.0])],
                    )
                })
                .collect(),
            lookbacks: vec![2.0, 4.0, 4.0],
            residuals: vec![1e-8, 2e-8, 5e-9],
            ensemble: 1,
            tol: 1e-6,
        };
        write_family(&dir, &family).unwrap();
        let back = read_family(&dir).unwrap();
        assert_eq!(back.times, family.times);
        assert_eq!(back.lookbacks, family.lookbacks);
        assert_eq!(back.ensemble, 1);
        for (a, b) in back.snapshots.iter().zip(&family.snapshots) {
            assert_eq!(a.elements[0].coeffs, b.elements[0].coeffs);
        }
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn plot_csv_shapes() {
        let s = xy_csv(("a", "b"), &[(1.0, 2.0)]);
        assert_eq!(s, "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
        let s = xyz_csv(("t", "d", "env"), &[(1.0, 0.5, 0.75)]);
        assert!(s.starts_with("t,d,env\n"));
        let cloud = PointCloud::new("x", vec![StateVector::new(vec![0.0])]);
        let report = estimate_box_dim(&cloud, &[0.5, 0.25]).unwrap();
        let csv = dimension_loglog_csv(&report);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("neg_log_r,log_n\n"));
    }
}
