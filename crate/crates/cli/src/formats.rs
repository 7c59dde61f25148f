//! File formats: CSV, JSON-lines, binary grids and PGM rasters.

use std::io::{self, BufRead, Read, Write};

use bifurc_core::angle::Angle;
use bifurc_core::kneading::CylinderCover;
use bifurc_core::measure::{EmpiricalMeasure, GridField, GridSpec, Rect};
use bifurc_core::per::RootSet;
use bifurc_core::portrait::CriticalPortrait;
use bifurc_core::rays::RayPoint;
use bifurc_core::Complex64;

fn invalid_data(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Shortest round-trip representation of a float.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w)
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e.to_string())
}

fn write_rows<W: Write>(w: &mut W, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for r in rows {
        out.write_record(&r).map_err(csv_err)?;
    }
    out.flush()
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn write_roots_csv<W: Write>(w: &mut W, roots: &RootSet) -> io::Result<()> {
    let rows = roots.roots.iter().map(|r| vec![num(r.z.re), num(r.z.im), r.multiplicity.to_string(), num(r.residual)]);
    write_rows(w, &strings(&["re", "im", "multiplicity", "residual"]), rows)
}

pub fn write_measure_jsonl<W: Write>(w: &mut W, m: &EmpiricalMeasure) -> io::Result<()> {
    for (z, wt) in &m.atoms {
        let line = serde_json::json!({ "re": z.re, "im": z.im, "weight": wt });
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_measure_jsonl<R: BufRead>(r: R) -> io::Result<EmpiricalMeasure> {
    #[derive(serde::Deserialize)]
    struct Atom {
        re: f64,
        im: f64,
        weight: f64,
    }
    let mut atoms = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let a: Atom = serde_json::from_str(&line).map_err(|e| invalid_data(e.to_string()))?;
        atoms.push((Complex64::new(a.re, a.im), a.weight));
    }
    EmpiricalMeasure::new(atoms).map_err(|e| invalid_data(e.to_string()))
}

/// Header: re_min, re_max, im_min, im_max (f64 LE), nx, ny (u64 LE); then
/// nx·ny f64 LE values, row-major (rows along the real axis).
pub fn write_grid<W: Write>(w: &mut W, g: &GridField) -> io::Result<()> {
    let b = g.spec.bounds;
    for x in [b.re_min, b.re_max, b.im_min, b.im_max] {
        w.write_all(&x.to_le_bytes())?;
    }
    w.write_all(&(g.spec.nx as u64).to_le_bytes())?;
    w.write_all(&(g.spec.ny as u64).to_le_bytes())?;
    for v in &g.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_grid<R: Read>(r: &mut R) -> io::Result<GridField> {
    let mut buf8 = [0u8; 8];
    let mut f = || -> io::Result<[u8; 8]> {
        r.read_exact(&mut buf8)?;
        Ok(buf8)
    };
    let mut bounds = [0.0; 4];
    for b in bounds.iter_mut() {
        *b = f64::from_le_bytes(f()?);
    }
    let nx = u64::from_le_bytes(f()?) as usize;
    let ny = u64::from_le_bytes(f()?) as usize;
    let rect = Rect::new(bounds[0], bounds[1], bounds[2], bounds[3]).map_err(|e| invalid_data(e.to_string()))?;
    let spec = GridSpec::new(rect, nx, ny).map_err(|e| invalid_data(e.to_string()))?;
    let count = nx.checked_mul(ny).ok_or_else(|| invalid_data("grid too large"))?;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(f()?));
    }
    GridField::from_values(spec, values).map_err(|e| invalid_data(e.to_string()))
}

/// Affine map from values to gray levels, clamped to [0, 255].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayMap {
    pub lo: f64,
    pub hi: f64,
}

impl GrayMap {
    /// Range of the finite values (a unit range when they are all equal).
    pub fn fit(g: &GridField) -> GrayMap {
        let (lo, hi) = (g.min(), g.max());
        if !(lo.is_finite() && hi.is_finite()) {
            return GrayMap { lo: 0.0, hi: 1.0 };
        }
        if hi > lo {
            GrayMap { lo, hi }
        } else {
            GrayMap { lo, hi: lo + 1.0 }
        }
    }

    /// Non-finite values map to 0.
    pub fn gray(&self, v: f64) -> u8 {
        if !v.is_finite() {
            return 0;
        }
        (255.0 * (v - self.lo) / (self.hi - self.lo)).round().clamp(0.0, 255.0) as u8
    }

    pub fn describe(&self) -> String {
        format!(
            "value-map gray = round(255*(v - {lo:?})/({hi:?} - {lo:?})) clamped to [0,255]; non-finite -> 0",
            lo = self.lo,
            hi = self.hi
        )
    }
}

/// P5 raster; the first image row is the top (largest imaginary part).
/// Line 2 of the header is the value-map comment.
pub fn write_pgm<W: Write>(w: &mut W, g: &GridField, map: &GrayMap) -> io::Result<()> {
    let (nx, ny) = (g.spec.nx, g.spec.ny);
    write!(w, "P5\n# {}\n{nx} {ny}\n255\n", map.describe())?;
    let mut row = vec![0u8; nx];
    for j in (0..ny).rev() {
        for (i, px) in row.iter_mut().enumerate() {
            *px = map.gray(g.get(i, j));
        }
        w.write_all(&row)?;
    }
    Ok(())
}

pub fn write_grid_csv<W: Write>(w: &mut W, g: &GridField) -> io::Result<()> {
    let spec = g.spec;
    let rows = (0..spec.ny).flat_map(move |j| {
        (0..spec.nx).map(move |i| {
            let p = spec.point(i, j);
            vec![num(p.re), num(p.im), num(g.get(i, j))]
        })
    });
    write_rows(w, &strings(&["re", "im", "value"]), rows)
}

pub fn portrait_json(p: &CriticalPortrait) -> serde_json::Value {
    serde_json::Value::Array(
        p.sets.iter().map(|s| serde_json::Value::Array(s.iter().map(|a| serde_json::Value::String(a.to_string_pq())).collect())).collect(),
    )
}

pub fn parse_portrait_json(v: &serde_json::Value) -> io::Result<CriticalPortrait> {
    let sets = v.as_array().ok_or_else(|| invalid_data("portrait must be a list of lists"))?;
    let mut out = Vec::with_capacity(sets.len());
    for s in sets {
        let items = s.as_array().ok_or_else(|| invalid_data("portrait must be a list of lists"))?;
        let mut set = Vec::with_capacity(items.len());
        for a in items {
            let text = a.as_str().ok_or_else(|| invalid_data("angles are \"p/q\" strings"))?;
            set.push(Angle::parse(text).map_err(|e| invalid_data(e.to_string()))?);
        }
        out.push(set);
    }
    Ok(CriticalPortrait::new(out))
}

pub fn write_ray_csv<W: Write>(w: &mut W, points: &[RayPoint]) -> io::Result<()> {
    let rows = points.iter().map(|p| vec![num(p.potential), num(p.point.re), num(p.point.im)]);
    write_rows(w, &strings(&["r", "re", "im"]), rows)
}

/// Parameter path of a stretching ray: r and the unknowns (c_1.., A = a^d).
pub fn write_path_csv<W: Write>(w: &mut W, path: &[(f64, Vec<Complex64>)]) -> io::Result<()> {
    let width = path.first().map_or(0, |p| p.1.len());
    let mut header = vec!["r".to_string()];
    for k in 0..width {
        let name = if k + 1 == width { "A".to_string() } else { format!("c{}", k + 1) };
        header.push(format!("{name}_re"));
        header.push(format!("{name}_im"));
    }
    let rows = path.iter().map(|(r, coords)| {
        let mut row = vec![num(*r)];
        for z in coords {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        row
    });
    write_rows(w, &header, rows)
}

pub fn write_cover_csv<W: Write>(w: &mut W, cover: &CylinderCover) -> io::Result<()> {
    let pq = |f: &bifurc_core::angle::Frac| format!("{}/{}", f.numer(), f.denom());
    let rows = cover.intervals.iter().map(|(lo, hi)| vec![pq(lo), pq(hi)]);
    write_rows(w, &strings(&["lo", "hi"]), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> GridField {
        let spec = GridSpec::new(Rect::new(-1.0, 2.0, -0.5, 0.5).unwrap(), 4, 3).unwrap();
        GridField::sample(spec, |z| z.re * 10.0 + z.im)
    }

    #[test]
    fn grid_round_trip_is_exact() {
        let g = field();
        let mut buf = Vec::new();
        write_grid(&mut buf, &g).unwrap();
        assert_eq!(buf.len(), 4 * 8 + 2 * 8 + 12 * 8);
        assert_eq!(&buf[..8], &(-1.0f64).to_le_bytes());
        assert_eq!(&buf[32..40], &4u64.to_le_bytes());
        let back = read_grid(&mut buf.as_slice()).unwrap();
        assert_eq!(back, g);
        assert!(read_grid(&mut &buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn measure_round_trip() {
        let m = EmpiricalMeasure::new(vec![(Complex64::new(0.1, -0.3), 0.25), (Complex64::new(-1.0, 0.0), 0.75)]).unwrap();
        let mut buf = Vec::new();
        write_measure_jsonl(&mut buf, &m).unwrap();
        let back = read_measure_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back.atoms, m.atoms);
    }

    #[test]
    fn pgm_layout() {
        let g = field();
        let map = GrayMap::fit(&g);
        let mut buf = Vec::new();
        write_pgm(&mut buf, &g, &map).unwrap();
        let text = String::from_utf8_lossy(&buf);
        let lines: Vec<&str> = text.splitn(5, '\n').collect();
        assert_eq!(lines[0], "P5");
        assert!(lines[1].starts_with("# value-map"));
        assert_eq!(lines[2], "4 3");
        assert_eq!(lines[3], "255");
        let pixels = &buf[buf.len() - 12..];
        // top row is the largest imaginary part; the darkest pixel is bottom-left
        assert_eq!(pixels[8], 0);
        assert_eq!(pixels[3], 255);
    }

    #[test]
    fn gray_map_clamps() {
        let m = GrayMap { lo: 0.0, hi: 2.0 };
        assert_eq!(m.gray(-1.0), 0);
        assert_eq!(m.gray(1.0), 128);
        assert_eq!(m.gray(9.0), 255);
        assert_eq!(m.gray(f64::NAN), 0);
    }

    #[test]
    fn roots_csv_is_crlf_with_header() {
        let roots = RootSet {
            roots: vec![bifurc_core::per::Root { z: Complex64::new(-1.0, 0.0), multiplicity: 2, residual: 0.0 }],
            residual_bound: 1e-10,
            degree: 2,
            converged: true,
            squarefree_certified: false,
        };
        let mut buf = Vec::new();
        write_roots_csv(&mut buf, &roots).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "re,im,multiplicity,residual\r\n-1.0,0.0,2,0.0\r\n");
    }

    #[test]
    fn portrait_json_round_trip() {
        let p = CriticalPortrait::parse(&[&["1/6", "2/3"]]).unwrap();
        let v = portrait_json(&p);
        assert_eq!(v.to_string(), r#"[["1/6","2/3"]]"#);
        assert_eq!(parse_portrait_json(&v).unwrap(), p);
    }
}
