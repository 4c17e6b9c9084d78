//! The achievable region as a polytope in `K` nonnegative rate coordinates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::infotheory::BoundTable;
use crate::subsets::SubsetMask;

/// Feasibility and deduplication tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
const PIVOT_FLOOR: f64 = 1e-12;

/// `{ R >= 0 : a . R <= c for every row }`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRegion {
    k: usize,
    rows: Vec<(Vec<f64>, f64)>,
}

impl RateRegion {
    pub fn new(k: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::GroundSize(k));
        }
        if let Some((a, _)) = rows.iter().find(|(a, _)| a.len() != k) {
            return Err(Error::Dimension(format!(
                "row has {} coefficients, expected {k}",
                a.len()
            )));
        }
        Ok(Self { k, rows })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        contains(self, point)
    }

    pub fn contains_within(&self, point: &[f64], tol: f64) -> Result<bool> {
        if point.len() != self.k {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, region has {}",
                point.len(),
                self.k
            )));
        }
        Ok(point.iter().all(|&x| x >= -tol)
            && self.rows.iter().all(|(a, c)| dot(a, point) <= c + tol))
    }

    /// An empty region has no feasible point in the nonnegative orthant.
    pub fn is_empty(&self) -> bool {
        if self.rows.iter().all(|(a, _)| a.iter().all(|&x| x >= 0.0)) {
            // downward closed: nonempty iff the origin is feasible
            !self.rows.iter().all(|(_, c)| *c >= -MEMBERSHIP_TOL)
        } else {
            vertices(self).is_empty()
        }
    }

    pub fn vertices(&self) -> VertexSet {
        vertices(self)
    }
}

/// One row `sum_{j in J} R_j <= b+J - b-J` per nonempty `J`, ascending.
pub fn closed_form_region(bounds: &BoundTable) -> RateRegion {
    closed_form_with(bounds, |s| bounds.gap(s))
}

/// The region with the secrecy terms dropped: `sum_{j in J} R_j <= b+J`.
pub fn reliability_region(bounds: &BoundTable) -> RateRegion {
    closed_form_with(bounds, |s| bounds.plus(s))
}

fn closed_form_with(bounds: &BoundTable, rhs: impl Fn(SubsetMask) -> f64) -> RateRegion {
    let k = bounds.k();
    let rows = SubsetMask::all_nonempty(k)
        .expect("bound table has a valid k")
        .map(|s| {
            let a = s.indicator_vector().into_iter().map(f64::from).collect();
            (a, rhs(s))
        })
        .collect();
    RateRegion { k, rows }
}

pub fn contains(region: &RateRegion, point: &[f64]) -> Result<bool> {
    region.contains_within(point, MEMBERSHIP_TOL)
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(p, q)| p * q).sum()
}

/// Vertices of a region, sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VertexSet {
    points: Vec<Vec<f64>>,
}

impl VertexSet {
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One point per line, `K` comma-separated columns, 12 significant digits.
    pub fn to_csv(&self) -> String {
        self.points
            .iter()
            .map(|p| {
                let cols: Vec<String> = p.iter().map(|&x| sig12(x)).collect();
                cols.join(",") + "\n"
            })
            .collect()
    }

    /// A JSON array of arrays.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite floats serialize")
    }

    /// True if some stored point is within `tol` (max norm) of `p`.
    pub fn contains_point(&self, p: &[f64], tol: f64) -> bool {
        self.points.iter().any(|q| max_dist(p, q) <= tol)
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `x` rounded to 12 significant digits, printed without trailing zeros.
pub fn sig12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

/// Solves every `K x K` subsystem of the region rows plus the axes
/// `R_i = 0`, keeping feasible, distinct solutions.
pub fn vertices(region: &RateRegion) -> VertexSet {
    let k = region.k;
    let mut planes: Vec<(Vec<f64>, f64)> = region.rows.clone();
    for i in 0..k {
        let mut a = vec![0.0; k];
        a[i] = -1.0;
        planes.push((a, 0.0));
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    for_each_combination(planes.len(), k, |pick| {
        let a: Vec<Vec<f64>> = pick.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve(a, b) {
            if region.contains_within(&x, MEMBERSHIP_TOL).unwrap_or(false)
                && !points.iter().any(|q| max_dist(q, &x) <= MEMBERSHIP_TOL)
            {
                points.push(x);
            }
        }
    });
    for p in &mut points {
        for x in p.iter_mut() {
            if x.abs() < PIVOT_FLOOR {
                *x = 0.0;
            }
        }
    }
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    VertexSet { points }
}

fn for_each_combination(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < PIVOT_FLOOR {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row);
            for (v, q) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *v -= f * q;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Same emptiness status, and every vertex of each region lies in the
/// other within `tol`.
pub fn polytope_equal(a: &RateRegion, b: &RateRegion, tol: f64) -> bool {
    if a.k != b.k {
        return false;
    }
    if a.is_empty() != b.is_empty() {
        return false;
    }
    let inside = |from: &RateRegion, to: &RateRegion| {
        vertices(from)
            .points()
            .iter()
            .all(|p| to.contains_within(p, tol).unwrap_or(false))
    };
    inside(a, b) && inside(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(k: usize, plus: &[(u32, f64)], minus: &[(u32, f64)]) -> BoundTable {
        let mut bt = BoundTable::zeros(k).unwrap();
        for &(bits, v) in plus {
            bt.set_plus(SubsetMask::new(bits, k).unwrap(), v);
        }
        for &(bits, v) in minus {
            bt.set_minus(SubsetMask::new(bits, k).unwrap(), v);
        }
        bt
    }

    /// Bounds of the xor/and example: b+ = 1 everywhere,
    /// b-{1} = b-{2} = H(Z) - 1/2, b-{1,2} = H(Z).
    fn xor_and_region() -> RateRegion {
        let hz = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        let bt = table(
            2,
            &[(1, 1.0), (2, 1.0), (3, 1.0)],
            &[(1, hz - 0.5), (2, hz - 0.5), (3, hz)],
        );
        closed_form_region(&bt)
    }

    #[test]
    fn xor_and_bounds_and_membership() {
        let r = xor_and_region();
        let rhs: Vec<f64> = r.rows().iter().map(|(_, c)| *c).collect();
        assert!((rhs[0] - 0.688722).abs() < 1e-6);
        assert!((rhs[1] - 0.688722).abs() < 1e-6);
        assert!((rhs[2] - 0.188722).abs() < 1e-6);
        assert!(r.contains(&[0.0, 0.0]).unwrap());
        assert!(r.contains(&[0.1, 0.05]).unwrap());
        assert!(!r.contains(&[0.1, 0.1]).unwrap());
        assert!(r.contains(&[0.1]).is_err());
    }

    #[test]
    fn xor_and_vertices() {
        let v = xor_and_region().vertices();
        assert_eq!(v.len(), 3);
        let s = 1.0 - 0.811_278_124_459_132_8;
        for p in [[0.0, 0.0], [s, 0.0], [0.0, s]] {
            assert!(v.contains_point(&p, 1e-9), "{p:?} missing from {v:?}");
        }
    }

    #[test]
    fn mac_pentagon() {
        let bt = table(2, &[(1, 1.0), (2, 1.0), (3, 1.5)], &[]);
        let v = closed_form_region(&bt).vertices();
        assert_eq!(
            v.points(),
            &[
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![0.5, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 0.5]
            ]
        );
    }

    #[test]
    fn negative_singleton_gap_is_empty() {
        let bt = table(2, &[(1, 0.2), (2, 1.0), (3, 1.0)], &[(1, 0.5)]);
        let r = closed_form_region(&bt);
        assert!(r.is_empty());
        assert!(r.vertices().is_empty());
    }

    #[test]
    fn equality_checks() {
        let r = xor_and_region();
        assert!(polytope_equal(&r, &r, 1e-9));
        let mut rows = r.rows().to_vec();
        rows[2].1 -= 0.01;
        let tighter = RateRegion::new(2, rows).unwrap();
        assert!(!polytope_equal(&r, &tighter, 1e-9));
    }

    #[test]
    fn zero_minus_matches_reliability_region() {
        let bt = table(
            3,
            &[
                (1, 0.4),
                (2, 0.5),
                (3, 0.8),
                (4, 0.3),
                (5, 0.6),
                (6, 0.7),
                (7, 1.0),
            ],
            &[],
        );
        assert!(polytope_equal(
            &closed_form_region(&bt),
            &reliability_region(&bt),
            1e-12
        ));
    }

    #[test]
    fn exports() {
        let bt = table(2, &[(1, 1.0), (2, 1.0), (3, 1.5)], &[]);
        let v = closed_form_region(&bt).vertices();
        assert_eq!(v.to_csv(), "0,0\n0,1\n0.5,1\n1,0\n1,0.5\n");
        assert_eq!(
            v.to_json(),
            "[[0.0,0.0],[0.0,1.0],[0.5,1.0],[1.0,0.0],[1.0,0.5]]"
        );
        assert_eq!(sig12(0.188_721_875_540_867_2), "0.188721875541");
        assert_eq!(sig12(-1.5e-20), "-0.000000000000000000015");
    }

    #[test]
    fn combinations_cover_all_subsets() {
        let mut n = 0;
        for_each_combination(5, 2, |_| n += 1);
        assert_eq!(n, 10);
        let mut m = 0;
        for_each_combination(2, 3, |_| m += 1);
        assert_eq!(m, 0);
    }
}
