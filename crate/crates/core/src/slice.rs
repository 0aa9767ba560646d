//! Planar slices through `C^n`: contours of `rho = 0` and of the ellipsoid
//! boundary, as line segments, CSV and a standalone SVG.

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::hermitian::Ellipsoid;
use crate::{CVector, Error, Result, C64};

/// Plane through `base` spanned by two real coordinates. Real coordinate
/// `2k` is `Re z_k` and `2k + 1` is `Im z_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePlane {
    pub axes: [usize; 2],
    #[serde(with = "crate::serde_complex::vector")]
    pub base: CVector,
    /// Half-width of the square window about the projection of `base`.
    pub extent: f64,
    /// Grid cells per side.
    pub resolution: usize,
}

impl SlicePlane {
    /// Window covering the enclosing ball of `d`, through the origin.
    pub fn for_domain(d: &Domain, axes: [usize; 2]) -> Self {
        SlicePlane { axes, base: CVector::zeros(d.dim()), extent: 1.1 * d.enclosing_radius(), resolution: 200 }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let [a, b] = self.axes;
        if a == b || a >= 2 * n || b >= 2 * n {
            return Err(Error::InvalidConfig(format!("degenerate slice plane: axes {a}, {b} in dimension {n}")));
        }
        if self.base.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.base.len() });
        }
        if !(self.extent.is_finite() && self.extent > 0.0) || self.resolution < 2 {
            return Err(Error::InvalidConfig("slice window must have positive extent and resolution >= 2".into()));
        }
        Ok(())
    }

    fn center(&self) -> [f64; 2] {
        self.axes.map(|a| coord(&self.base, a))
    }

    /// Point of `C^n` at plane coordinates `(u, v)`.
    pub fn lift(&self, u: f64, v: f64) -> CVector {
        let mut z = self.base.clone();
        set_coord(&mut z, self.axes[0], u);
        set_coord(&mut z, self.axes[1], v);
        z
    }
}

fn coord(z: &CVector, k: usize) -> f64 {
    if k % 2 == 0 {
        z[k / 2].re
    } else {
        z[k / 2].im
    }
}

fn set_coord(z: &mut CVector, k: usize, x: f64) {
    let c = z[k / 2];
    z[k / 2] = if k % 2 == 0 { C64::new(x, c.im) } else { C64::new(c.re, x) };
}

pub type Segment = [[f64; 2]; 2];

/// Zero contour of `f` over the window, by marching squares with linear
/// interpolation. Saddle cells are split by the sign of the cell average.
pub fn contour(plane: &SlicePlane, f: impl Fn(&CVector) -> f64) -> Vec<Segment> {
    let r = plane.resolution;
    let [cu, cv] = plane.center();
    let h = 2.0 * plane.extent / r as f64;
    let xs: Vec<f64> = (0..=r).map(|i| cu - plane.extent + i as f64 * h).collect();
    let ys: Vec<f64> = (0..=r).map(|j| cv - plane.extent + j as f64 * h).collect();
    let vals: Vec<f64> = (0..=r)
        .flat_map(|j| {
            let y = ys[j];
            xs.iter().map(move |&x| (x, y))
        })
        .map(|(x, y)| f(&plane.lift(x, y)))
        .collect();
    let at = |i: usize, j: usize| vals[j * (r + 1) + i];
    let mut segs = Vec::new();
    for j in 0..r {
        for i in 0..r {
            // corners counterclockwise from bottom-left
            let p = [[xs[i], ys[j]], [xs[i + 1], ys[j]], [xs[i + 1], ys[j + 1]], [xs[i], ys[j + 1]]];
            let v = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let cross = |a: usize, b: usize| -> [f64; 2] {
                let t = v[a] / (v[a] - v[b]);
                [p[a][0] + t * (p[b][0] - p[a][0]), p[a][1] + t * (p[b][1] - p[a][1])]
            };
            let edges: Vec<[f64; 2]> = (0..4)
                .filter(|&e| (v[e] < 0.0) != (v[(e + 1) % 4] < 0.0))
                .map(|e| cross(e, (e + 1) % 4))
                .collect();
            match edges.len() {
                2 => segs.push([edges[0], edges[1]]),
                4 => {
                    // edges are ordered 0-1, 1-2, 2-3, 3-0
                    let mean = v.iter().sum::<f64>() / 4.0;
                    if (mean < 0.0) == (v[0] < 0.0) {
                        segs.push([edges[0], edges[1]]);
                        segs.push([edges[2], edges[3]]);
                    } else {
                        segs.push([edges[3], edges[0]]);
                        segs.push([edges[1], edges[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub plane: SlicePlane,
    pub domain: Vec<Segment>,
    pub ellipsoid: Vec<Segment>,
}

pub fn slice(d: &Domain, e: Option<&Ellipsoid>, plane: &SlicePlane) -> Result<Slice> {
    plane.validate(d.dim())?;
    if let Some(e) = e {
        if e.dim() != d.dim() {
            return Err(Error::DimensionMismatch { expected: d.dim(), got: e.dim() });
        }
    }
    Ok(Slice {
        plane: plane.clone(),
        domain: contour(plane, |z| d.rho(z.as_slice())),
        ellipsoid: e.map_or_else(Vec::new, |e| contour(plane, |z| e.gauge(z) - 1.0)),
    })
}

impl Slice {
    /// `curve,u0,v0,u1,v1`, one segment per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("curve,u0,v0,u1,v1\n");
        for (name, segs) in [("domain", &self.domain), ("ellipsoid", &self.ellipsoid)] {
            for s in segs.iter() {
                out.push_str(&format!("{name},{},{},{},{}\n", s[0][0], s[0][1], s[1][0], s[1][1]));
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let size = 600.0;
        let [cu, cv] = self.plane.center();
        let ext = self.plane.extent;
        let map = |p: [f64; 2]| ((p[0] - cu + ext) / (2.0 * ext) * size, (1.0 - (p[1] - cv + ext) / (2.0 * ext)) * size);
        let path = |segs: &[Segment]| {
            let mut d = String::new();
            for s in segs {
                let (x0, y0) = map(s[0]);
                let (x1, y1) = map(s[1]);
                d.push_str(&format!("M{x0:.2} {y0:.2}L{x1:.2} {y1:.2}"));
            }
            d
        };
        let (ox, oy) = map([0.0, 0.0]);
        format!(
            concat!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n",
                "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n",
                "<path d=\"M0 {oy:.2}H{s}M{ox:.2} 0V{s}\" stroke=\"#ccc\" stroke-width=\"1\"/>\n",
                "<path d=\"{dom}\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" fill=\"none\"/>\n",
                "<path d=\"{ell}\" stroke=\"#c0392b\" stroke-width=\"1.5\" fill=\"none\"/>\n",
                "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"12\">axes {a}, {b}; window {ext}</text>\n",
                "</svg>\n"
            ),
            s = size,
            ox = ox,
            oy = oy,
            dom = path(&self.domain),
            ell = path(&self.ellipsoid),
            a = self.plane.axes[0],
            b = self.plane.axes[1],
            ext = ext,
        )
    }
}

/// Number of connected pieces among the segments, joining endpoints that
/// agree to `tol`.
pub fn components(segs: &[Segment], tol: f64) -> usize {
    let pts: Vec<[f64; 2]> = segs.iter().flat_map(|s| [s[0], s[1]]).collect();
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let next = p[i];
            p[i] = r;
            i = next;
        }
        r
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
        }
    };
    for k in 0..segs.len() {
        union(&mut parent, 2 * k, 2 * k + 1);
    }
    // bucket endpoints on a grid of size tol so matching is near-linear
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        let key = ((p[0] / tol).floor() as i64, (p[1] / tol).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(others) = buckets.get(&(key.0 + dx, key.1 + dy)) {
                    for &o in others {
                        if (pts[o][0] - p[0]).hypot(pts[o][1] - p[1]) <= tol {
                            union(&mut parent, i, o);
                        }
                    }
                }
            }
        }
        buckets.entry(key).or_default().push(i);
    }
    let mut roots: Vec<usize> = (0..pts.len()).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}
