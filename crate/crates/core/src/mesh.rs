//! Triangle meshes in the ball: OBJ and CSV output, OBJ parsing and a
//! self-intersection heuristic.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::hyperbolic::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarColumn {
    pub name: String,
    pub values: Vec<f64>,
}

/// Vertices strictly inside the ball, 0-based triangles, per-vertex columns
/// of the same length as the vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshOutput {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    scalars: Vec<ScalarColumn>,
}

impl MeshOutput {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(v) = vertices.iter().find(|v| !(v.norm() < 1.0)) {
            return Err(GeomError::OutsideBall { norm: v.norm() });
        }
        if triangles.iter().flatten().any(|&i| i >= vertices.len()) {
            return Err(GeomError::InvalidInput("triangle index out of range".into()));
        }
        Ok(Self { vertices, triangles, scalars: Vec::new() })
    }

    pub fn with_scalar(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.vertices.len() {
            return Err(GeomError::InvalidInput(format!(
                "column '{name}' has {} values for {} vertices",
                values.len(),
                self.vertices.len()
            )));
        }
        self.scalars.push(ScalarColumn { name: name.to_string(), values });
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn scalars(&self) -> &[ScalarColumn] {
        &self.scalars
    }

    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.scalars.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    /// `v x y z` lines with 17 significant digits, then 1-based `f i j k`.
    pub fn write_obj<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    pub fn obj_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_obj(&mut out).expect("writing to memory");
        out
    }

    /// Sidecar CSV: `index` then one column per scalar.
    pub fn write_scalars_csv<W: Write>(&self, w: W) -> std::result::Result<(), csv::Error> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let mut header = vec!["index".to_string()];
        header.extend(self.scalars.iter().map(|c| c.name.clone()));
        wr.write_record(&header)?;
        for i in 0..self.vertices.len() {
            let mut row = vec![i.to_string()];
            row.extend(self.scalars.iter().map(|c| format!("{:.16e}", c.values[i])));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn csv_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_scalars_csv(&mut out).expect("writing to memory");
        out
    }
}

/// Vertices and 0-based triangles of an OBJ text with `v` and `f` lines.
/// Face entries may carry `/vt/vn` suffixes, which are ignored.
pub fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let bad = |n: usize, what: &str| GeomError::InvalidInput(format!("OBJ line {n}: {what}"));
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let xs: Vec<f64> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(n + 1, "bad number"))?;
                if xs.len() < 3 {
                    return Err(bad(n + 1, "vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(xs[0], xs[1], xs[2]));
            }
            Some("f") => {
                let ids: Vec<usize> = parts
                    .map(|p| p.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(n + 1, "bad index"))?;
                if ids.len() != 3 || ids.contains(&0) {
                    return Err(bad(n + 1, "faces must be 1-based triangles"));
                }
                triangles.push([ids[0] - 1, ids[1] - 1, ids[2] - 1]);
            }
            _ => {}
        }
    }
    if triangles.iter().flatten().any(|&i| i >= vertices.len()) {
        return Err(GeomError::InvalidInput("OBJ face index out of range".into()));
    }
    Ok((vertices, triangles))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionReport {
    /// Intersecting triangle pairs `(i, j)` with `i < j`, sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Pairs that shared a hash cell and were tested.
    pub candidates: usize,
}

/// Segment `p + s (q - p)`, `s` in `[0, 1]`, against triangle `abc`.
fn segment_hits_triangle(p: &Vec3, q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> bool {
    let eps = 1e-12;
    let d = q - p;
    let (e1, e2) = (b - a, c - a);
    let h = d.cross(&e2);
    let det = e1.dot(&h);
    let scale = d.norm() * e1.norm() * e2.norm();
    if det.abs() <= eps * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = p - a;
    let u = inv * s.dot(&h);
    if !(-eps..=1.0 + eps).contains(&u) {
        return false;
    }
    let qv = s.cross(&e1);
    let v = inv * d.dot(&qv);
    if v < -eps || u + v > 1.0 + eps {
        return false;
    }
    let t = inv * e2.dot(&qv);
    (-eps..=1.0 + eps).contains(&t)
}

fn triangles_intersect(x: [&Vec3; 3], y: [&Vec3; 3]) -> bool {
    (0..3).any(|i| segment_hits_triangle(x[i], x[(i + 1) % 3], y[0], y[1], y[2]))
        || (0..3).any(|i| segment_hits_triangle(y[i], y[(i + 1) % 3], x[0], x[1], x[2]))
}

/// Triangle pairs that cross, found by hashing bounding boxes into cells of
/// the mean box size and testing edges against faces. Pairs sharing a
/// vertex and coplanar overlaps are not reported.
pub fn mesh_self_intersection(mesh: &MeshOutput) -> IntersectionReport {
    let v = mesh.vertices();
    let tris = mesh.triangles();
    if tris.is_empty() {
        return IntersectionReport { pairs: Vec::new(), candidates: 0 };
    }
    let boxes: Vec<(Vec3, Vec3)> = tris
        .iter()
        .map(|t| {
            let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
            (a.inf(&b).inf(&c), a.sup(&b).sup(&c))
        })
        .collect();
    let mean = boxes.iter().map(|(lo, hi)| (hi - lo).max()).sum::<f64>() / boxes.len() as f64;
    let cell = if mean > 0.0 { mean } else { 1.0 };
    let key = |x: f64| (x / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, (lo, hi)) in boxes.iter().enumerate() {
        for ix in key(lo.x)..=key(hi.x) {
            for iy in key(lo.y)..=key(hi.y) {
                for iz in key(lo.z)..=key(hi.z) {
                    grid.entry((ix, iy, iz)).or_default().push(i);
                }
            }
        }
    }
    let mut candidates = BTreeSet::new();
    for members in grid.values() {
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                if tris[a].iter().any(|x| tris[b].contains(x)) {
                    continue;
                }
                let (la, ha) = &boxes[a];
                let (lb, hb) = &boxes[b];
                let overlap = (0..3).all(|d| la[d] <= hb[d] && lb[d] <= ha[d]);
                if overlap {
                    candidates.insert((a, b));
                }
            }
        }
    }
    let pairs = candidates
        .iter()
        .copied()
        .filter(|&(a, b)| {
            let ta = tris[a].map(|i| &v[i]);
            let tb = tris[b].map(|i| &v[i]);
            triangles_intersect(ta, tb)
        })
        .collect();
    IntersectionReport { pairs, candidates: candidates.len() }
}
