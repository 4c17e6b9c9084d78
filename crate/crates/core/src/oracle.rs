//! Brute-force cross-checks that share no code with the main pipeline:
//! mutual information by entropy differences over hash-map marginals, and
//! a floating-point Fourier-Motzkin eliminator with vertex-based
//! redundancy removal.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::infotheory::{JointDistribution, VarSet};
use crate::random::seeded;

const TOL: f64 = 1e-9;

/// Rows `a . x <= c` over `dim` float variables.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSystem {
    dim: usize,
    rows: Vec<(Vec<f64>, f64)>,
}

impl NumericSystem {
    pub fn new(dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (a, c) in &rows {
            if a.len() != dim {
                return Err(Error::Dimension(format!(
                    "row has {} coefficients, expected {dim}",
                    a.len()
                )));
            }
            if !c.is_finite() || a.iter().any(|x| !x.is_finite()) {
                return Err(Error::Dimension(
                    "non-finite entry in numeric system".into(),
                ));
            }
        }
        Ok(Self { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn entropy(joint: &JointDistribution, axes: &[usize]) -> f64 {
    if axes.is_empty() {
        return 0.0;
    }
    let dims = joint.dims();
    let mut marginal: HashMap<Vec<usize>, f64> = HashMap::new();
    for (flat, &p) in joint.pmf().iter().enumerate() {
        // decode the full tuple, first axis outermost
        let mut tuple = vec![0usize; dims.len()];
        let mut rest = flat;
        for a in (0..dims.len()).rev() {
            tuple[a] = rest % dims[a];
            rest /= dims[a];
        }
        let key: Vec<usize> = axes.iter().map(|&a| tuple[a]).collect();
        *marginal.entry(key).or_insert(0.0) += p;
    }
    -marginal
        .values()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// `I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`.
pub fn oracle_mi(joint: &JointDistribution, a: VarSet, b: VarSet, c: VarSet) -> Result<f64> {
    if a.bits() & b.bits() != 0 || a.bits() & c.bits() != 0 || b.bits() & c.bits() != 0 {
        return Err(Error::OverlappingVariables(format!(
            "{:#b}/{:#b}/{:#b}",
            a.bits(),
            b.bits(),
            c.bits()
        )));
    }
    let n = joint.dims().len();
    if (a.bits() | b.bits() | c.bits()) >> n != 0 {
        return Err(Error::UnknownVariable("axis beyond distribution".into()));
    }
    let axes = |s: VarSet| -> Vec<usize> { (0..n).filter(|&x| s.contains_axis(x)).collect() };
    let ac = axes(a.union(c));
    let bc = axes(b.union(c));
    let abc = axes(a.union(b).union(c));
    let cc = axes(c);
    Ok(entropy(joint, &ac) + entropy(joint, &bc) - entropy(joint, &abc) - entropy(joint, &cc))
}

/// Scales a row so its largest absolute coefficient is 1.
fn scale_row(a: &[f64], c: f64) -> (Vec<f64>, f64) {
    let m = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return (a.to_vec(), c);
    }
    (a.iter().map(|x| x / m).collect(), c / m)
}

fn lhs_key(a: &[f64]) -> Vec<i64> {
    a.iter().map(|x| (x * 1e8).round() as i64).collect()
}

/// Among rows with the same left-hand side keep the smallest bound.
fn keep_tightest(rows: Vec<(Vec<f64>, f64)>) -> Vec<(Vec<f64>, f64)> {
    let mut best: HashMap<Vec<i64>, (Vec<f64>, f64)> = HashMap::new();
    let mut order = Vec::new();
    for (a, c) in rows {
        let key = lhs_key(&a);
        match best.get_mut(&key) {
            Some(slot) => {
                if c < slot.1 {
                    slot.1 = c;
                }
            }
            None => {
                order.push(key.clone());
                best.insert(key, (a, c));
            }
        }
    }
    order
        .into_iter()
        .map(|k| best.remove(&k).unwrap())
        .collect()
}

/// Textbook Fourier-Motzkin over floats, eliminating `eliminate` in the
/// given order. Between steps, rows with the same left-hand side are
/// reduced to the tightest one. After the last step the surviving
/// coordinates are treated as nonnegative rates and a row is dropped when
/// every vertex of the remaining rows satisfies it and sampled interior
/// points agree.
pub fn oracle_fm(sys: &NumericSystem, eliminate: &[usize]) -> Result<NumericSystem> {
    if eliminate.is_empty() {
        return Ok(sys.clone());
    }
    let dim = sys.dim;
    if let Some(&v) = eliminate.iter().find(|&&v| v >= dim) {
        return Err(Error::VariableOutOfRange { index: v, dim });
    }
    let mut rows: Vec<(Vec<f64>, f64)> = sys.rows.iter().map(|(a, c)| scale_row(a, *c)).collect();
    for &v in eliminate {
        let mut next = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (a, c) in rows {
            if a[v].abs() < 1e-12 {
                let mut a = a;
                a[v] = 0.0;
                next.push((a, c));
            } else if a[v] > 0.0 {
                pos.push((a, c));
            } else {
                neg.push((a, c));
            }
        }
        for (pa, pc) in &pos {
            for (na, nc) in &neg {
                let (wp, wn) = (-na[v], pa[v]);
                let mut a: Vec<f64> = pa.iter().zip(na).map(|(x, y)| wp * x + wn * y).collect();
                a[v] = 0.0;
                let c = wp * pc + wn * nc;
                next.push(scale_row(&a, c));
            }
        }
        rows = keep_tightest(next);
    }

    let survivors: Vec<usize> = (0..dim).filter(|v| !eliminate.contains(v)).collect();
    let projected: Vec<(Vec<f64>, f64)> = rows
        .iter()
        .map(|(a, c)| (survivors.iter().map(|&v| a[v]).collect(), *c))
        .collect();
    let kept = drop_redundant(projected);
    let lifted = kept
        .into_iter()
        .map(|(a, c)| {
            let mut full = vec![0.0; dim];
            for (&v, x) in survivors.iter().zip(a) {
                full[v] = x;
            }
            (full, c)
        })
        .collect();
    NumericSystem::new(dim, lifted)
}

/// Vertices of `{ x >= 0 : rows }` by brute-force basis solves.
pub fn oracle_vertices(rows: &[(Vec<f64>, f64)], d: usize) -> Vec<Vec<f64>> {
    let mut planes: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..d {
        let mut a = vec![0.0; d];
        a[i] = -1.0;
        planes.push((a, 0.0));
    }
    let feasible = |x: &[f64]| {
        x.iter().all(|&v| v >= -TOL)
            && rows
                .iter()
                .all(|(a, c)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= c + TOL)
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick: Vec<usize> = (0..d).collect();
    if planes.len() < d {
        return out;
    }
    loop {
        let m: Vec<Vec<f64>> = pick.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = gauss_jordan(m, b) {
            if feasible(&x)
                && !out
                    .iter()
                    .any(|p| p.iter().zip(&x).all(|(u, v)| (u - v).abs() <= TOL))
            {
                out.push(x);
            }
        }
        // next combination
        let n = planes.len();
        let mut i = d;
        while i > 0 && pick[i - 1] == i - 1 + n - d {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        pick[i - 1] += 1;
        for j in i..d {
            pick[j] = pick[j - 1] + 1;
        }
    }
    out
}

fn gauss_jordan(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut best = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[best][col].abs() {
                best = r;
            }
        }
        if m[best][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, best);
        b.swap(col, best);
        let p = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= p);
        b[col] /= p;
        let pivot = m[col].clone();
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for (v, q) in m[r].iter_mut().zip(&pivot) {
                    *v -= f * q;
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some(b)
}

/// True when every coordinate is capped by some row with nonnegative
/// coefficients, so the orthant slice is bounded.
fn bounded(rows: &[(Vec<f64>, f64)], d: usize) -> bool {
    (0..d).all(|i| {
        rows.iter()
            .any(|(a, _)| a[i] > 0.0 && a.iter().all(|&x| x >= 0.0))
    })
}

fn drop_redundant(mut rows: Vec<(Vec<f64>, f64)>) -> Vec<(Vec<f64>, f64)> {
    let d = match rows.first() {
        Some((a, _)) => a.len(),
        None => return rows,
    };
    // rows with no surviving coefficients are either vacuous or infeasible
    rows.retain(|(a, c)| a.iter().any(|&x| x != 0.0) || *c < -TOL);
    if rows.iter().any(|(a, _)| a.iter().all(|&x| x == 0.0)) {
        return rows;
    }
    let mut rng = seeded(0x5eed);
    let mut i = 0;
    while i < rows.len() {
        let rest: Vec<(Vec<f64>, f64)> = rows
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if rest.is_empty() || !bounded(&rest, d) {
            i += 1;
            continue;
        }
        let (a, c) = &rows[i];
        let satisfied = |x: &[f64]| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= c + TOL;
        let verts = oracle_vertices(&rest, d);
        let mut redundant = !verts.is_empty() && verts.iter().all(|v| satisfied(v));
        if redundant {
            // random convex combinations of the vertices must also comply
            for _ in 0..64 {
                let w: Vec<f64> = verts.iter().map(|_| rng.gen::<f64>()).collect();
                let total: f64 = w.iter().sum();
                let x: Vec<f64> = (0..d)
                    .map(|j| verts.iter().zip(&w).map(|(v, wi)| v[j] * wi).sum::<f64>() / total)
                    .collect();
                if !satisfied(&x) {
                    redundant = false;
                    break;
                }
            }
        }
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    rows
}
