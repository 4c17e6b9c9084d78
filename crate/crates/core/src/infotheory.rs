//! Channel and input-distribution model, the joint pmf over
//! `(Q, V_1..V_K, Y, Z)`, conditional mutual information, and the
//! set-indexed reliability/secrecy bounds.
//!
//! All information quantities are in bits.

use std::fmt;

use crate::error::{Error, Result};
use crate::subsets::{compact_form_direct, SetFamily, SubsetMask, MAX_K};

/// Tolerance for pmf slices handed to the constructors.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Largest joint state space accepted.
pub const MAX_ATOMS: u128 = 10_000_000;

fn check_slice(slice: &[f64], name: impl Fn() -> String, tol: f64) -> Result<()> {
    for &p in slice {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::BadProbability {
                slice: name(),
                value: p,
            });
        }
    }
    let sum: f64 = slice.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::NotNormalized { slice: name(), sum });
    }
    Ok(())
}

/// Per-letter kernel `p(y, z | x_1..x_K)`.
///
/// `w` is flattened row-major with `x_1` outermost, then `x_2..x_K`, then
/// `y`, then `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    x_sizes: Vec<usize>,
    y_size: usize,
    z_size: usize,
    w: Vec<f64>,
}

impl ChannelSpec {
    pub fn new(x_sizes: Vec<usize>, y_size: usize, z_size: usize, w: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(x_sizes, y_size, z_size, w, NORMALIZATION_TOL)
    }

    pub fn with_tolerance(
        x_sizes: Vec<usize>,
        y_size: usize,
        z_size: usize,
        w: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        let k = x_sizes.len();
        if k == 0 || k > MAX_K {
            return Err(Error::GroundSize(k));
        }
        if x_sizes.contains(&0) || y_size == 0 || z_size == 0 {
            return Err(Error::Dimension("alphabet sizes must be positive".into()));
        }
        let inputs = checked_product(&x_sizes)?;
        let yz = y_size * z_size;
        if w.len() as u128 != inputs * yz as u128 {
            return Err(Error::Dimension(format!(
                "p_yz_given_x has {} entries, expected {}",
                w.len(),
                inputs * yz as u128
            )));
        }
        for (row, slice) in w.chunks(yz).enumerate() {
            check_slice(
                slice,
                || {
                    format!(
                        "p_yz_given_x[x={}]",
                        format_tuple(&unflatten(row, &x_sizes))
                    )
                },
                tol,
            )?;
        }
        Ok(Self {
            x_sizes,
            y_size,
            z_size,
            w,
        })
    }

    pub fn k(&self) -> usize {
        self.x_sizes.len()
    }

    pub fn x_sizes(&self) -> &[usize] {
        &self.x_sizes
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn kernel(&self) -> &[f64] {
        &self.w
    }

    /// The `|Y| * |Z|` slice for a flattened input index.
    pub fn row(&self, x_index: usize) -> &[f64] {
        let yz = self.y_size * self.z_size;
        &self.w[x_index * yz..(x_index + 1) * yz]
    }
}

/// Time-sharing variable `Q` and the factored inputs
/// `p(q) * prod_i p(v_i | q) * p(x_i | v_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InputPolicy {
    p_q: Vec<f64>,
    /// `[transmitter][q][v]`
    p_v_given_q: Vec<Vec<Vec<f64>>>,
    /// `[transmitter][v][x]`
    p_x_given_v: Vec<Vec<Vec<f64>>>,
}

impl InputPolicy {
    pub fn new(
        p_q: Vec<f64>,
        p_v_given_q: Vec<Vec<Vec<f64>>>,
        p_x_given_v: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        Self::with_tolerance(p_q, p_v_given_q, p_x_given_v, NORMALIZATION_TOL)
    }

    pub fn with_tolerance(
        p_q: Vec<f64>,
        p_v_given_q: Vec<Vec<Vec<f64>>>,
        p_x_given_v: Vec<Vec<Vec<f64>>>,
        tol: f64,
    ) -> Result<Self> {
        let k = p_v_given_q.len();
        if k == 0 || k > MAX_K {
            return Err(Error::GroundSize(k));
        }
        if p_x_given_v.len() != k {
            return Err(Error::Dimension(format!(
                "p_x_given_v covers {} transmitters, p_v_given_q covers {k}",
                p_x_given_v.len()
            )));
        }
        if p_q.is_empty() {
            return Err(Error::Dimension("p_q is empty".into()));
        }
        check_slice(&p_q, || "p_q".to_string(), tol)?;
        for (i, per_q) in p_v_given_q.iter().enumerate() {
            if per_q.len() != p_q.len() {
                return Err(Error::Dimension(format!(
                    "p_v_given_q[{}] has {} rows, expected |Q| = {}",
                    i + 1,
                    per_q.len(),
                    p_q.len()
                )));
            }
            let v_size = per_q[0].len();
            if v_size == 0 {
                return Err(Error::Dimension(format!("V_{} alphabet is empty", i + 1)));
            }
            for (q, slice) in per_q.iter().enumerate() {
                if slice.len() != v_size {
                    return Err(Error::Dimension(format!(
                        "p_v_given_q[{}][q={q}] has {} entries, expected {v_size}",
                        i + 1,
                        slice.len()
                    )));
                }
                check_slice(slice, || format!("p_v_given_q[{}][q={q}]", i + 1), tol)?;
            }
            let per_v = &p_x_given_v[i];
            if per_v.len() != v_size {
                return Err(Error::Dimension(format!(
                    "p_x_given_v[{}] has {} rows, expected |V_{}| = {v_size}",
                    i + 1,
                    per_v.len(),
                    i + 1
                )));
            }
            let x_size = per_v[0].len();
            for (v, slice) in per_v.iter().enumerate() {
                if slice.len() != x_size || x_size == 0 {
                    return Err(Error::Dimension(format!(
                        "p_x_given_v[{}][v={v}] has {} entries, expected {x_size}",
                        i + 1,
                        slice.len()
                    )));
                }
                check_slice(slice, || format!("p_x_given_v[{}][v={v}]", i + 1), tol)?;
            }
        }
        Ok(Self {
            p_q,
            p_v_given_q,
            p_x_given_v,
        })
    }

    pub fn k(&self) -> usize {
        self.p_v_given_q.len()
    }

    pub fn q_size(&self) -> usize {
        self.p_q.len()
    }

    pub fn v_sizes(&self) -> Vec<usize> {
        self.p_v_given_q
            .iter()
            .map(|per_q| per_q[0].len())
            .collect()
    }

    pub fn x_sizes(&self) -> Vec<usize> {
        self.p_x_given_v
            .iter()
            .map(|per_v| per_v[0].len())
            .collect()
    }

    pub fn p_q(&self) -> &[f64] {
        &self.p_q
    }

    pub fn p_v_given_q(&self) -> &[Vec<Vec<f64>>] {
        &self.p_v_given_q
    }

    pub fn p_x_given_v(&self) -> &[Vec<Vec<f64>>] {
        &self.p_x_given_v
    }
}

/// A random variable of the joint distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    /// Auxiliary input of transmitter `i` (1-based).
    V(usize),
    Y,
    Z,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q => f.write_str("Q"),
            Var::V(i) => write!(f, "V{i}"),
            Var::Y => f.write_str("Y"),
            Var::Z => f.write_str("Z"),
        }
    }
}

/// A set of variables, stored as a bit mask over axis positions
/// `(q, v_1..v_K, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct VarSet(u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn of(vars: &[Var], k: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &v in vars {
            bits |= 1 << axis_of(v, k)?;
        }
        Ok(VarSet(bits))
    }

    /// `V_J` for a transmitter subset.
    pub fn auxiliaries(set: SubsetMask) -> Self {
        VarSet(set.bits() << 1)
    }

    pub fn with(self, v: Var, k: usize) -> Result<Self> {
        Ok(VarSet(self.0 | 1 << axis_of(v, k)?))
    }

    pub fn union(self, other: VarSet) -> Self {
        VarSet(self.0 | other.0)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains_axis(self, axis: usize) -> bool {
        self.0 & (1 << axis) != 0
    }

    pub fn axes(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |a| bits & (1 << a) != 0)
    }
}

fn axis_of(v: Var, k: usize) -> Result<usize> {
    match v {
        Var::Q => Ok(0),
        Var::V(i) if i >= 1 && i <= k => Ok(i),
        Var::V(_) => Err(Error::UnknownVariable(v.to_string())),
        Var::Y => Ok(k + 1),
        Var::Z => Ok(k + 2),
    }
}

fn axis_name(axis: usize, k: usize) -> String {
    match axis {
        0 => "Q".into(),
        a if a <= k => format!("V{a}"),
        a if a == k + 1 => "Y".into(),
        _ => "Z".into(),
    }
}

/// Dense pmf over `(q, v_1..v_K, y, z)`, row-major in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    k: usize,
    dims: Vec<usize>,
    pmf: Vec<f64>,
}

impl JointDistribution {
    /// Wraps an explicit pmf. `dims` lists `|Q|, |V_1|..|V_K|, |Y|, |Z|`.
    pub fn from_pmf(dims: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if dims.len() < 4 || dims.len() - 3 > MAX_K {
            return Err(Error::Dimension(format!(
                "expected |Q|, |V_1..V_K|, |Y|, |Z|; got {} sizes",
                dims.len()
            )));
        }
        let atoms = checked_product(&dims)?;
        if pmf.len() as u128 != atoms {
            return Err(Error::Dimension(format!(
                "pmf has {} entries, expected {atoms}",
                pmf.len()
            )));
        }
        check_slice(&pmf, || "joint pmf".to_string(), 1e-10)?;
        Ok(Self {
            k: dims.len() - 3,
            dims,
            pmf,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `|Q|, |V_1|..|V_K|, |Y|, |Z|`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf.iter().sum()
    }

    /// Marginal over `vars`, as a dense table in ascending axis order.
    fn marginal(&self, vars: VarSet) -> (Vec<usize>, Vec<f64>) {
        project(&self.dims, &self.pmf, vars.bits())
    }
}

/// Sums out every axis not in `keep`. Returns the kept dims and the table.
fn project(dims: &[usize], table: &[f64], keep: u32) -> (Vec<usize>, Vec<f64>) {
    let kept: Vec<usize> = (0..dims.len()).filter(|a| keep & (1 << a) != 0).collect();
    let out_dims: Vec<usize> = kept.iter().map(|&a| dims[a]).collect();
    let out_len: usize = out_dims.iter().product();
    // stride of each input axis inside the output table (0 when summed out)
    let mut out_stride = vec![0usize; dims.len()];
    let mut s = 1;
    for &a in kept.iter().rev() {
        out_stride[a] = s;
        s *= dims[a];
    }
    let mut out = vec![0.0; out_len];
    let mut idx = vec![0usize; dims.len()];
    let mut pos = 0usize;
    for &p in table {
        out[pos] += p;
        // odometer increment, last axis fastest
        for a in (0..dims.len()).rev() {
            idx[a] += 1;
            pos += out_stride[a];
            if idx[a] < dims[a] {
                break;
            }
            pos -= out_stride[a] * dims[a];
            idx[a] = 0;
        }
    }
    (out_dims, out)
}

fn checked_product(sizes: &[usize]) -> Result<u128> {
    let mut n: u128 = 1;
    for &s in sizes {
        n = n.saturating_mul(s as u128);
        if n > MAX_ATOMS {
            return Err(Error::StateSpaceTooLarge(n));
        }
    }
    Ok(n)
}

fn unflatten(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = index % s;
        index /= s;
    }
    out
}

fn format_tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// `p(q, v, y, z) = p(q) prod_i p(v_i|q) sum_x prod_i p(x_i|v_i) w(y,z|x)`.
pub fn joint_distribution(
    channel: &ChannelSpec,
    policy: &InputPolicy,
) -> Result<JointDistribution> {
    let k = channel.k();
    if policy.k() != k {
        return Err(Error::Dimension(format!(
            "channel has {k} transmitters, policy has {}",
            policy.k()
        )));
    }
    if policy.x_sizes() != channel.x_sizes() {
        return Err(Error::Dimension(format!(
            "policy input alphabets {:?} differ from channel alphabets {:?}",
            policy.x_sizes(),
            channel.x_sizes()
        )));
    }
    let v_sizes = policy.v_sizes();
    let x_sizes = channel.x_sizes();
    let yz = channel.y_size() * channel.z_size();
    let mut dims = Vec::with_capacity(k + 3);
    dims.push(policy.q_size());
    dims.extend_from_slice(&v_sizes);
    dims.push(channel.y_size());
    dims.push(channel.z_size());
    checked_product(&dims)?;
    let v_count = checked_product(&v_sizes)? as usize;
    let x_count = checked_product(x_sizes)? as usize;

    // p(y, z | v) for every auxiliary tuple
    let mut through = vec![0.0; v_count * yz];
    for vi in 0..v_count {
        let v = unflatten(vi, &v_sizes);
        let out = &mut through[vi * yz..(vi + 1) * yz];
        for xi in 0..x_count {
            let x = unflatten(xi, x_sizes);
            let weight: f64 = (0..k)
                .map(|i| policy.p_x_given_v()[i][v[i]][x[i]])
                .product();
            if weight == 0.0 {
                continue;
            }
            for (o, &w) in out.iter_mut().zip(channel.row(xi)) {
                *o += weight * w;
            }
        }
    }

    let mut pmf = Vec::with_capacity(policy.q_size() * v_count * yz);
    for q in 0..policy.q_size() {
        let pq = policy.p_q()[q];
        for vi in 0..v_count {
            let v = unflatten(vi, &v_sizes);
            let pv: f64 = (0..k).map(|i| policy.p_v_given_q()[i][q][v[i]]).product();
            pmf.extend(through[vi * yz..(vi + 1) * yz].iter().map(|&c| pq * pv * c));
        }
    }
    JointDistribution::from_pmf(dims, pmf)
}

/// `I(A; B | C)` in bits, summing `p(abc) log p(abc)p(c) / (p(ac)p(bc))`.
pub fn conditional_mutual_information(
    joint: &JointDistribution,
    a: VarSet,
    b: VarSet,
    c: VarSet,
) -> Result<f64> {
    let n_axes = joint.dims.len();
    for set in [a, b, c] {
        if set.bits() >> n_axes != 0 {
            return Err(Error::UnknownVariable(format!(
                "axis mask {:#b}",
                set.bits()
            )));
        }
    }
    for (x, y) in [(a, b), (a, c), (b, c)] {
        let overlap = x.bits() & y.bits();
        if overlap != 0 {
            let names: Vec<String> = VarSet(overlap)
                .axes()
                .map(|ax| axis_name(ax, joint.k))
                .collect();
            return Err(Error::OverlappingVariables(names.join(",")));
        }
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let abc = a.union(b).union(c);
    let (dims, p_abc) = joint.marginal(abc);
    // re-express A, B, C as masks over the axes of the ABC table
    let axes: Vec<usize> = abc.axes().collect();
    let local = |set: VarSet| {
        axes.iter()
            .enumerate()
            .filter(|(_, &ax)| set.contains_axis(ax))
            .fold(0u32, |m, (i, _)| m | 1 << i)
    };
    let (la, lb, lc) = (local(a), local(b), local(c));
    let (_, p_ac) = project(&dims, &p_abc, la | lc);
    let (_, p_bc) = project(&dims, &p_abc, lb | lc);
    let (_, p_c) = project(&dims, &p_abc, lc);

    let strides = |mask: u32| {
        let mut st = vec![0usize; dims.len()];
        let mut s = 1;
        for i in (0..dims.len()).rev() {
            if mask & (1 << i) != 0 {
                st[i] = s;
                s *= dims[i];
            }
        }
        st
    };
    let (s_ac, s_bc, s_c) = (strides(la | lc), strides(lb | lc), strides(lc));

    let mut total = 0.0;
    let mut idx = vec![0usize; dims.len()];
    for &p in &p_abc {
        if p > 0.0 {
            let dot = |st: &[usize]| idx.iter().zip(st).map(|(i, s)| i * s).sum::<usize>();
            let pac = p_ac[dot(&s_ac)];
            let pbc = p_bc[dot(&s_bc)];
            let pc = p_c[dot(&s_c)];
            total += p * ((p * pc) / (pac * pbc)).log2();
        }
        for a in (0..dims.len()).rev() {
            idx[a] += 1;
            if idx[a] < dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(total)
}

/// `b+_J = I(V_J; Y | V_{J^c}, Q)` and `b-_J = I(V_J; Z | Q)` for every
/// subset `J`, indexed by mask bits. Entry 0 (the empty set) is exactly 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTable {
    k: usize,
    b_plus: Vec<f64>,
    b_minus: Vec<f64>,
}

impl BoundTable {
    /// Builds a table from explicit values indexed by mask bits
    /// (`len == 2^k`); entry 0 is forced to 0.
    pub fn from_values(k: usize, mut b_plus: Vec<f64>, mut b_minus: Vec<f64>) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::GroundSize(k));
        }
        let n = 1usize << k;
        if b_plus.len() != n || b_minus.len() != n {
            return Err(Error::Dimension(format!(
                "bound table for k = {k} needs {n} entries per sign"
            )));
        }
        b_plus[0] = 0.0;
        b_minus[0] = 0.0;
        Ok(Self { k, b_plus, b_minus })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        let n = 1usize << k;
        Self::from_values(k, vec![0.0; n], vec![0.0; n])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn plus(&self, set: SubsetMask) -> f64 {
        self.b_plus[set.bits() as usize]
    }

    pub fn minus(&self, set: SubsetMask) -> f64 {
        self.b_minus[set.bits() as usize]
    }

    /// `b+_J - b-_J`.
    pub fn gap(&self, set: SubsetMask) -> f64 {
        self.plus(set) - self.minus(set)
    }

    pub fn plus_values(&self) -> &[f64] {
        &self.b_plus
    }

    pub fn minus_values(&self) -> &[f64] {
        &self.b_minus
    }

    pub fn set_plus(&mut self, set: SubsetMask, value: f64) {
        if !set.is_empty() {
            self.b_plus[set.bits() as usize] = value;
        }
    }

    pub fn set_minus(&mut self, set: SubsetMask, value: f64) {
        if !set.is_empty() {
            self.b_minus[set.bits() as usize] = value;
        }
    }
}

pub fn bound_table(joint: &JointDistribution) -> Result<BoundTable> {
    let k = joint.k();
    let n = 1usize << k;
    let mut b_plus = vec![0.0; n];
    let mut b_minus = vec![0.0; n];
    let q = VarSet::of(&[Var::Q], k)?;
    let y = VarSet::of(&[Var::Y], k)?;
    let z = VarSet::of(&[Var::Z], k)?;
    for set in SubsetMask::all_nonempty(k)? {
        let vj = VarSet::auxiliaries(set);
        let vjc = VarSet::auxiliaries(set.complement());
        b_plus[set.bits() as usize] = conditional_mutual_information(joint, vj, y, vjc.union(q))?;
        b_minus[set.bits() as usize] = conditional_mutual_information(joint, vj, z, q)?;
    }
    BoundTable::from_values(k, b_plus, b_minus)
}

/// Outcome of [`check_rate_condition`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateCheck {
    Pass,
    /// First subset (ascending mask order) whose sum falls short of `b-_J`.
    Fail(SubsetMask),
}

/// Checks `sum_{j in J} R_{v,j} >= b-_J - 1e-12` for every nonempty `J`.
pub fn check_rate_condition(rates: &[f64], bounds: &BoundTable) -> Result<RateCheck> {
    let k = bounds.k();
    if rates.len() != k {
        return Err(Error::Dimension(format!(
            "{} rates for {k} transmitters",
            rates.len()
        )));
    }
    if let Some((i, &r)) = rates
        .iter()
        .enumerate()
        .find(|(_, &r)| r < 0.0 || r.is_nan())
    {
        return Err(Error::NegativeRate {
            index: i + 1,
            value: r,
        });
    }
    for set in SubsetMask::all_nonempty(k)? {
        let sum: f64 = (0..k)
            .filter(|&i| set.contains_index(i))
            .map(|i| rates[i])
            .sum();
        if sum < bounds.minus(set) - 1e-12 {
            return Ok(RateCheck::Fail(set));
        }
    }
    Ok(RateCheck::Pass)
}

/// Returns the submodularity residual of `b+` and the supermodularity
/// residual of `b-` at `(t1, t2)`; both are nonnegative for tables computed
/// from a distribution.
pub fn check_modularity(bounds: &BoundTable, t1: SubsetMask, t2: SubsetMask) -> (f64, f64) {
    let (meet, join) = (t1.intersection(t2), t1.union(t2));
    let plus = bounds.plus(t1) + bounds.plus(t2) - bounds.plus(meet) - bounds.plus(join);
    let minus = bounds.minus(meet) + bounds.minus(join) - bounds.minus(t1) - bounds.minus(t2);
    (plus, minus)
}

/// Compares sums of `b+`/`b-` over a family against sums over its compact
/// form. Returns `(sum b+ over F - sum b+ over F*, sum b- over F* - sum b- over F)`.
pub fn check_dominance_sums(bounds: &BoundTable, family: &SetFamily) -> Result<(f64, f64)> {
    let compact = compact_form_direct(family)?;
    let sum = |fam: &SetFamily, f: &dyn Fn(SubsetMask) -> f64| -> f64 {
        fam.members().iter().map(|&m| f(m)).sum()
    };
    let plus = sum(family, &|m| bounds.plus(m)) - sum(&compact, &|m| bounds.plus(m));
    let minus = sum(&compact, &|m| bounds.minus(m)) - sum(family, &|m| bounds.minus(m));
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// K = 2 with identity `p(x|v)`, uniform bits, `Y = V1 xor V2`, `Z = V1 and V2`.
    pub(crate) fn xor_and() -> JointDistribution {
        let mut w = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let hit = y == (x1 ^ x2) && z == (x1 & x2);
                        w.push(if hit { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        let channel = ChannelSpec::new(vec![2, 2], 2, 2, w).unwrap();
        let ident = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let policy = InputPolicy::new(
            vec![1.0],
            vec![vec![vec![0.5, 0.5]], vec![vec![0.5, 0.5]]],
            vec![ident.clone(), ident],
        )
        .unwrap();
        joint_distribution(&channel, &policy).unwrap()
    }

    fn set(k: usize, e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(e, k).unwrap()
    }

    #[test]
    fn degenerate_alphabets_give_point_mass_times_kernel() {
        let channel =
            ChannelSpec::new(vec![1, 1], 2, 3, vec![0.1, 0.2, 0.05, 0.3, 0.25, 0.1]).unwrap();
        let policy = InputPolicy::new(
            vec![1.0],
            vec![vec![vec![1.0]], vec![vec![1.0]]],
            vec![vec![vec![1.0]], vec![vec![1.0]]],
        )
        .unwrap();
        let j = joint_distribution(&channel, &policy).unwrap();
        assert_eq!(j.pmf(), channel.kernel());
    }

    #[test]
    fn xor_and_has_four_quarter_atoms() {
        let j = xor_and();
        let mut atoms: Vec<f64> = j.pmf().iter().copied().filter(|&p| p > 0.0).collect();
        atoms.sort_by(f64::total_cmp);
        assert_eq!(atoms, vec![0.25; 4]);
        assert!((j.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let err = ChannelSpec::new(vec![1], 1, 2, vec![0.5, 0.4]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
        assert!(matches!(
            ChannelSpec::new(vec![2], 1, 1, vec![1.0]).unwrap_err(),
            Error::Dimension(_)
        ));
        let policy =
            InputPolicy::new(vec![1.0], vec![vec![vec![1.0]]], vec![vec![vec![0.5, 0.5]]]).unwrap();
        let channel = ChannelSpec::new(vec![3], 1, 1, vec![1.0; 3]).unwrap();
        assert!(matches!(
            joint_distribution(&channel, &policy),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ChannelSpec::new(vec![10_000, 10_000], 1, 1, vec![]),
            Err(Error::StateSpaceTooLarge(_))
        ));
    }

    #[test]
    fn cmi_examples() {
        let j = xor_and();
        let k = 2;
        let v1 = VarSet::of(&[Var::V(1)], k).unwrap();
        let v2 = VarSet::of(&[Var::V(2)], k).unwrap();
        let y = VarSet::of(&[Var::Y], k).unwrap();
        let z = VarSet::of(&[Var::Z], k).unwrap();
        let v12 = v1.union(v2);
        assert!(
            conditional_mutual_information(&j, v1, v2, VarSet::EMPTY)
                .unwrap()
                .abs()
                < 1e-12
        );
        // Y is independent of V1 alone
        assert!(
            conditional_mutual_information(&j, v1, y, VarSet::EMPTY)
                .unwrap()
                .abs()
                < 1e-12
        );
        let h_z = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        let i = conditional_mutual_information(&j, v12, z, VarSet::EMPTY).unwrap();
        assert!((i - h_z).abs() < 1e-12);
        assert!((i - 0.811278).abs() < 1e-6);
        assert!(matches!(
            conditional_mutual_information(&j, v1, v12, VarSet::EMPTY),
            Err(Error::OverlappingVariables(_))
        ));
    }

    #[test]
    fn noiseless_copy_is_one_bit() {
        let channel = ChannelSpec::new(vec![2], 2, 1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let policy = InputPolicy::new(
            vec![1.0],
            vec![vec![vec![0.5, 0.5]]],
            vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]],
        )
        .unwrap();
        let j = joint_distribution(&channel, &policy).unwrap();
        let k = 1;
        let i = conditional_mutual_information(
            &j,
            VarSet::of(&[Var::V(1)], k).unwrap(),
            VarSet::of(&[Var::Y], k).unwrap(),
            VarSet::of(&[Var::Q], k).unwrap(),
        )
        .unwrap();
        assert!((i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xor_and_bounds() {
        let bt = bound_table(&xor_and()).unwrap();
        let h_z = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        // H(Z | V1 = 1) = 1, H(Z | V1 = 0) = 0
        let b_minus_1 = h_z - 0.5;
        assert!((bt.plus(set(2, &[1])) - 1.0).abs() < 1e-12);
        assert!((bt.plus(set(2, &[2])) - 1.0).abs() < 1e-12);
        assert!((bt.plus(set(2, &[1, 2])) - 1.0).abs() < 1e-12);
        assert!((bt.minus(set(2, &[1])) - b_minus_1).abs() < 1e-12);
        assert!((bt.minus(set(2, &[1])) - 0.311278).abs() < 1e-6);
        assert!((bt.minus(set(2, &[1, 2])) - h_z).abs() < 1e-12);
        assert_eq!(bt.plus(SubsetMask::empty(2).unwrap()), 0.0);
    }

    #[test]
    fn independent_eavesdropper_has_zero_minus() {
        // Y = X1, Z uniform regardless of input
        let mut w = Vec::new();
        for x1 in 0..2 {
            for _x2 in 0..2 {
                for y in 0..2 {
                    for _z in 0..2 {
                        w.push(if y == x1 { 0.5 } else { 0.0 });
                    }
                }
            }
        }
        let channel = ChannelSpec::new(vec![2, 2], 2, 2, w).unwrap();
        let policy = InputPolicy::new(
            vec![0.3, 0.7],
            vec![
                vec![vec![0.2, 0.8], vec![0.6, 0.4]],
                vec![vec![0.5, 0.5], vec![0.1, 0.9]],
            ],
            vec![
                vec![vec![0.9, 0.1], vec![0.3, 0.7]],
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            ],
        )
        .unwrap();
        let bt = bound_table(&joint_distribution(&channel, &policy).unwrap()).unwrap();
        for s in SubsetMask::all_nonempty(2).unwrap() {
            assert!(bt.minus(s).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_condition_examples() {
        let zeros = BoundTable::zeros(2).unwrap();
        assert_eq!(
            check_rate_condition(&[0.0, 0.0], &zeros).unwrap(),
            RateCheck::Pass
        );
        let bt = bound_table(&xor_and()).unwrap();
        assert_eq!(
            check_rate_condition(&[0.2, 1.0], &bt).unwrap(),
            RateCheck::Fail(set(2, &[1]))
        );
        assert_eq!(
            check_rate_condition(&[0.32, 0.32], &bt).unwrap(),
            RateCheck::Fail(set(2, &[1, 2]))
        );
        assert_eq!(
            check_rate_condition(&[0.5, 0.5], &bt).unwrap(),
            RateCheck::Pass
        );
        assert!(matches!(
            check_rate_condition(&[-0.1, 0.5], &bt),
            Err(Error::NegativeRate { index: 1, .. })
        ));
    }

    #[test]
    fn modularity_trivial_cases_are_exact_zero() {
        let bt = bound_table(&xor_and()).unwrap();
        let a = set(2, &[1]);
        let b = set(2, &[1, 2]);
        assert_eq!(check_modularity(&bt, a, a), (0.0, 0.0));
        let (p, m) = check_modularity(&bt, a, b);
        assert_eq!((p, m), (0.0, 0.0));
    }

    #[test]
    fn dominance_on_chain_is_exact_zero() {
        let bt = bound_table(&xor_and()).unwrap();
        let chain = SetFamily::from_lists(2, &[&[1, 2], &[1]]).unwrap();
        assert_eq!(check_dominance_sums(&bt, &chain).unwrap(), (0.0, 0.0));
        let empty = SetFamily::new(2, vec![]).unwrap();
        assert_eq!(check_dominance_sums(&bt, &empty), Err(Error::EmptyFamily));
    }
}
