//! Symbolic Fourier-Motzkin elimination of the randomization rates.
//!
//! The starting system has, for every nonempty `J ⊆ {1..K}`, a reliability
//! row and a secrecy row over the variables `R_1..R_K, Rr_1..Rr_K`:
//!
//! ```text
//! sum_{j in J} (R_j + Rr_j) <= b+J
//! -sum_{j in J} Rr_j       <= -b-J
//! ```
//!
//! Left-hand sides are exact rationals and right-hand sides are exact
//! rational combinations of the symbols `b+J`, `b-J`. Every row produced by
//! elimination is a nonnegative combination of these rows, so its
//! left-hand side determines two presence vectors: `p+` (the `R` part) and
//! `p- = p+ - (Rr part)`. Their compact chains give a dominating
//! decomposition into *elementary* rows `(S, T)`:
//!
//! ```text
//! 1_S . R + (1_S - 1_T) . Rr <= b+S - b-T
//! ```
//!
//! which is what [`prune_by_compact_dominance`] uses to discard rows.
//!
//! # Text form
//!
//! One row per line:
//!
//! ```text
//! row    := lhs "<=" rhs
//! lhs    := "0" | lterm { ("+" | "-") lterm }       (leading "-" allowed)
//! lterm  := rational "*" var
//! var    := "R" index | "Rr" index                  (1-based index)
//! rhs    := "0" | sterm { ("+" | "-") sterm }       (leading "-" allowed)
//! sterm  := [rational "*"] symbol | rational
//! symbol := ("b+" | "b-") "{" index { "," index } "}"
//! rational := digits [ "/" digits ]
//! ```
//!
//! for example `1*R1 + 1*R2 <= b+{1,2} - b-{1,2}`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::infotheory::BoundTable;
use crate::oracle::NumericSystem;
use crate::subsets::{PresenceVector, SubsetMask};

/// Largest `k` accepted by [`build_system`].
pub const MAX_SYSTEM_K: usize = 8;

/// A bound symbol: `b+J` or `b-J` for a nonempty `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Plus(SubsetMask),
    Minus(SubsetMask),
}

impl Symbol {
    pub fn set(self) -> SubsetMask {
        match self {
            Symbol::Plus(s) | Symbol::Minus(s) => s,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sign, set) = match self {
            Symbol::Plus(s) => ('+', s),
            Symbol::Minus(s) => ('-', s),
        };
        let parts: Vec<String> = set.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "b{sign}{{{}}}", parts.join(","))
    }
}

/// Rational affine combination of bound symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymbolicAffine {
    coeffs: BTreeMap<Symbol, BigRational>,
    constant: BigRational,
}

impl SymbolicAffine {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `1 * symbol`; symbols on the empty set are identically zero.
    pub fn symbol(sym: Symbol) -> Self {
        let mut out = Self::zero();
        out.add_term(sym, BigRational::one());
        out
    }

    pub fn constant(value: BigRational) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<Symbol, BigRational> {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &BigRational {
        &self.constant
    }

    pub fn coeff(&self, sym: Symbol) -> BigRational {
        self.coeffs
            .get(&sym)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn add_term(&mut self, sym: Symbol, c: BigRational) {
        if sym.set().is_empty() || c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(sym).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&sym);
        }
    }

    pub fn add_scaled(&mut self, other: &SymbolicAffine, scale: &BigRational) {
        for (&sym, c) in &other.coeffs {
            self.add_term(sym, c * scale);
        }
        self.constant += &other.constant * scale;
    }

    pub fn scaled(&self, scale: &BigRational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, scale);
        out
    }

    /// Substitutes real values from a bound table.
    pub fn eval(&self, bounds: &BoundTable) -> Result<f64> {
        let mut total = to_f64(&self.constant);
        for (&sym, c) in &self.coeffs {
            let set = sym.set();
            if set.k() != bounds.k() {
                return Err(Error::UnknownSymbol(sym.to_string()));
            }
            let v = match sym {
                Symbol::Plus(s) => bounds.plus(s),
                Symbol::Minus(s) => bounds.minus(s),
            };
            total += to_f64(c) * v;
        }
        Ok(total)
    }
}

impl std::ops::Add for &SymbolicAffine {
    type Output = SymbolicAffine;
    fn add(self, rhs: &SymbolicAffine) -> SymbolicAffine {
        let mut out = self.clone();
        out.add_scaled(rhs, &BigRational::one());
        out
    }
}

impl fmt::Display for SymbolicAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: &BigRational, body: Option<String>| {
            let neg = c.is_negative();
            let mag = c.abs();
            let sep = match (first, neg) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            first = false;
            match body {
                Some(b) if mag.is_one() => write!(f, "{sep}{b}"),
                Some(b) => write!(f, "{sep}{mag}*{b}"),
                None => write!(f, "{sep}{mag}"),
            }
        };
        // b+ terms, then b- terms, each in ascending mask order
        for (sym, c) in self
            .coeffs
            .iter()
            .filter(|(s, _)| matches!(s, Symbol::Plus(_)))
        {
            term(f, c, Some(sym.to_string()))?;
        }
        for (sym, c) in self
            .coeffs
            .iter()
            .filter(|(s, _)| matches!(s, Symbol::Minus(_)))
        {
            term(f, c, Some(sym.to_string()))?;
        }
        if !self.constant.is_zero() {
            term(f, &self.constant, None)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Variable layout: `R_1..R_K` at `0..K`, `Rr_1..Rr_K` at `K..2K`.
pub fn rate_var(i: usize) -> usize {
    i - 1
}

pub fn randomization_var(k: usize, i: usize) -> usize {
    k + i - 1
}

/// `lhs . (R, Rr) <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    lhs: Vec<BigRational>,
    rhs: SymbolicAffine,
}

impl Inequality {
    pub fn new(lhs: Vec<BigRational>, rhs: SymbolicAffine) -> Self {
        Self { lhs, rhs }
    }

    /// The elementary row `1_S . R + (1_S - 1_T) . Rr <= b+S - b-T`.
    pub fn elementary(plus: SubsetMask, minus: SubsetMask) -> Self {
        let k = plus.k();
        let mut lhs = vec![BigRational::zero(); 2 * k];
        for i in 0..k {
            let p = plus.contains_index(i) as i64;
            let m = minus.contains_index(i) as i64;
            lhs[i] = int(p);
            lhs[k + i] = int(p - m);
        }
        let mut rhs = SymbolicAffine::symbol(Symbol::Plus(plus));
        rhs.add_term(Symbol::Minus(minus), -BigRational::one());
        Self { lhs, rhs }
    }

    /// Parses one row of the text form over `2k` variables.
    pub fn parse(line: &str, k: usize) -> Result<Self> {
        parse_row(line, k)
    }

    pub fn lhs(&self) -> &[BigRational] {
        &self.lhs
    }

    pub fn rhs(&self) -> &SymbolicAffine {
        &self.rhs
    }

    pub fn k(&self) -> usize {
        self.lhs.len() / 2
    }

    pub fn coeff(&self, var: usize) -> &BigRational {
        &self.lhs[var]
    }

    pub fn scaled(&self, s: &BigRational) -> Self {
        Self {
            lhs: self.lhs.iter().map(|c| c * s).collect(),
            rhs: self.rhs.scaled(s),
        }
    }

    fn add(&self, other: &Inequality) -> Self {
        Self {
            lhs: self
                .lhs
                .iter()
                .zip(&other.lhs)
                .map(|(a, b)| a + b)
                .collect(),
            rhs: &self.rhs + &other.rhs,
        }
    }

    /// True when every randomization coefficient is zero.
    pub fn is_rate_only(&self) -> bool {
        self.lhs[self.k()..].iter().all(Zero::is_zero)
    }

    /// Divides through so the left-hand side is a primitive integer vector.
    pub fn normalized(&self) -> Self {
        let mut den = BigInt::one();
        for c in &self.lhs {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in &self.lhs {
            let n = c.numer() * (&den / c.denom());
            g = g.gcd(&n);
        }
        if g.is_zero() {
            return self.clone();
        }
        self.scaled(&BigRational::new(den, g))
    }

    /// Integer presence vectors `(p+, p-)` of a normalized row.
    fn presences(&self) -> Result<(PresenceVector, PresenceVector)> {
        let k = self.k();
        let mut plus = Vec::with_capacity(k);
        let mut minus = Vec::with_capacity(k);
        for i in 0..k {
            let r = &self.lhs[i];
            let m = r - &self.lhs[k + i];
            let (Some(r), Some(m)) = (as_count(r), as_count(&m)) else {
                return Err(Error::NegativeCoefficient(self.to_string()));
            };
            plus.push(r);
            minus.push(m);
        }
        Ok((PresenceVector::new(plus)?, PresenceVector::new(minus)?))
    }

    fn sort_key(&self) -> (u32, u32, Vec<BigRational>, String) {
        let k = self.k();
        let support = |range: std::ops::Range<usize>| {
            range
                .enumerate()
                .filter(|(_, v)| !self.lhs[*v].is_zero())
                .fold(0u32, |m, (i, _)| m | 1 << i)
        };
        (
            support(k..2 * k),
            support(0..k),
            self.lhs.clone(),
            self.rhs.to_string(),
        )
    }
}

fn as_count(r: &BigRational) -> Option<u32> {
    if r.is_integer() && !r.is_negative() {
        r.to_integer().to_u32()
    } else {
        None
    }
}

fn var_name(k: usize, v: usize) -> String {
    if v < k {
        format!("R{}", v + 1)
    } else {
        format!("Rr{}", v - k + 1)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.k();
        let mut first = true;
        for (v, c) in self.lhs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sep = match (first, c.is_negative()) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            first = false;
            write!(f, "{sep}{}*{}", c.abs(), var_name(k, v))?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " <= {}", self.rhs)
    }
}

/// A list of rows over `2k` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalitySystem {
    k: usize,
    rows: Vec<Inequality>,
}

impl InequalitySystem {
    pub fn new(k: usize, rows: Vec<Inequality>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.lhs.len() != 2 * k) {
            return Err(Error::Dimension(format!(
                "row {r} has {} coefficients, expected {}",
                r.lhs.len(),
                2 * k
            )));
        }
        Ok(Self { k, rows })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sorts rows into canonical order: rows with fewer randomization
    /// variables first, then by support mask ascending.
    pub fn canonical(mut self) -> Self {
        self.rows.sort_by_cached_key(Inequality::sort_key);
        self
    }

    /// The text form, one row per line.
    pub fn to_text(&self) -> String {
        self.rows.iter().map(|r| format!("{r}\n")).collect()
    }

    /// Parses the text form. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse_row(l, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, rows)
    }
}

impl fmt::Display for InequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            s.trim().parse().map_err(|_| bad())?,
        )),
    }
}

/// Splits `a + b - c` into signed terms. A `-` right after `b` is part of
/// a symbol name, not an operator.
fn signed_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let s = s.trim();
    let mut out = Vec::new();
    let mut neg = false;
    let mut cur = String::new();
    let mut depth = 0;
    let chars: Vec<char> = s.chars().collect();
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '{' => {
                depth += 1;
                cur.push(ch);
            }
            '}' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && !(i > 0 && chars[i - 1] == 'b') => {
                if !cur.trim().is_empty() {
                    out.push((neg, cur.trim().to_string()));
                } else if !out.is_empty() || cur.contains(|c: char| !c.is_whitespace()) {
                    return Err(Error::Parse(format!("dangling operator in {s:?}")));
                }
                cur.clear();
                neg = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("missing term in {s:?}")));
    }
    out.push((neg, cur.trim().to_string()));
    Ok(out)
}

fn parse_row(line: &str, k: usize) -> Result<Inequality> {
    let (lhs_text, rhs_text) = line
        .split_once("<=")
        .ok_or_else(|| Error::Parse(format!("missing '<=' in {line:?}")))?;
    let mut lhs = vec![BigRational::zero(); 2 * k];
    if lhs_text.trim() != "0" {
        for (neg, term) in signed_terms(lhs_text)? {
            let (c, v) = term
                .split_once('*')
                .ok_or_else(|| Error::Parse(format!("expected coeff*var, got {term:?}")))?;
            let mut c = parse_rational(c)?;
            if neg {
                c = -c;
            }
            let v = v.trim();
            let (idx, offset) = if let Some(i) = v.strip_prefix("Rr") {
                (i, k)
            } else if let Some(i) = v.strip_prefix('R') {
                (i, 0)
            } else {
                return Err(Error::Parse(format!("unknown variable {v:?}")));
            };
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable {v:?}")))?;
            if i == 0 || i > k {
                return Err(Error::Parse(format!("variable {v:?} outside 1..={k}")));
            }
            lhs[offset + i - 1] += c;
        }
    }
    let mut rhs = SymbolicAffine::zero();
    if rhs_text.trim() != "0" {
        for (neg, term) in signed_terms(rhs_text)? {
            let (c, body) = match term.split_once('*') {
                Some((c, b)) => (parse_rational(c)?, b.trim().to_string()),
                None if term.starts_with('b') => (BigRational::one(), term.clone()),
                None => (parse_rational(&term)?, String::new()),
            };
            let c = if neg { -c } else { c };
            if body.is_empty() {
                rhs.constant += c;
                continue;
            }
            let set_text = body
                .get(2..)
                .ok_or_else(|| Error::Parse(format!("bad symbol {body:?}")))?;
            let set = SubsetMask::parse(set_text, k)?;
            let sym = match &body[..2] {
                "b+" => Symbol::Plus(set),
                "b-" => Symbol::Minus(set),
                _ => return Err(Error::Parse(format!("bad symbol {body:?}"))),
            };
            rhs.add_term(sym, c);
        }
    }
    Ok(Inequality::new(lhs, rhs))
}

/// Reliability and secrecy rows for every nonempty subset: first all
/// `[1_J | 1_J] x <= b+J`, then all `[0 | -1_J] x <= -b-J`, each block in
/// ascending mask order.
pub fn build_system(k: usize) -> Result<InequalitySystem> {
    if k == 0 || k > MAX_SYSTEM_K {
        return Err(Error::GroundSize(k));
    }
    let empty = SubsetMask::empty(k)?;
    let mut rows = Vec::with_capacity(2 * ((1 << k) - 1));
    for set in SubsetMask::all_nonempty(k)? {
        rows.push(Inequality::elementary(set, empty));
    }
    for set in SubsetMask::all_nonempty(k)? {
        rows.push(Inequality::elementary(empty, set));
    }
    InequalitySystem::new(k, rows)
}

/// `sum_{j in J} R_j <= b+J - b-J` for every nonempty `J`, ascending.
pub fn closed_form_system(k: usize) -> Result<InequalitySystem> {
    if k == 0 || k > MAX_SYSTEM_K {
        return Err(Error::GroundSize(k));
    }
    let rows = SubsetMask::all_nonempty(k)?
        .map(|s| Inequality::elementary(s, s))
        .collect();
    InequalitySystem::new(k, rows)
}

pub type IntMatrix = Vec<Vec<i64>>;

pub fn kronecker(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (br, bc) = (b.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![0; a.first().map_or(0, Vec::len) * bc]; a.len() * br];
    for (i, arow) in a.iter().enumerate() {
        for (j, &x) in arow.iter().enumerate() {
            for (p, brow) in b.iter().enumerate() {
                for (q, &y) in brow.iter().enumerate() {
                    out[i * br + p][j * bc + q] = x * y;
                }
            }
        }
    }
    out
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    let inner = a.first().map_or(0, Vec::len);
    if inner != b.len() {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{inner} by {}x{}",
            a.len(),
            b.len(),
            b.first().map_or(0, Vec::len)
        )));
    }
    let cols = b.first().map_or(0, Vec::len);
    Ok(a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect())
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect()
}

/// The `(2^k - 1) x k` matrix whose rows are the indicator vectors of the
/// nonempty subsets, ascending.
pub fn indicator_matrix(k: usize) -> Result<IntMatrix> {
    Ok(SubsetMask::all_nonempty(k)?
        .map(|s| s.indicator_vector().into_iter().map(i64::from).collect())
        .collect())
}

/// Randomization block of the starting system: `[1; -1] ⊗ [1_J]`.
pub fn randomization_block(k: usize) -> Result<IntMatrix> {
    Ok(kronecker(&vec![vec![1], vec![-1]], &indicator_matrix(k)?))
}

/// `[1 1] ⊗ I_{2^k - 1}`: each row adds a reliability row to the secrecy
/// row of the same subset.
pub fn base_matrix_g(k: usize) -> Result<IntMatrix> {
    if k == 0 || k > 20 {
        return Err(Error::GroundSize(k));
    }
    Ok(kronecker(&vec![vec![1, 1]], &identity((1 << k) - 1)))
}

/// Applies each row of `G` as combination weights to the starting system.
pub fn apply_g(k: usize) -> Result<InequalitySystem> {
    let g = base_matrix_g(k)?;
    let start = build_system(k)?;
    let rows = g
        .iter()
        .map(|weights| {
            let mut acc = Inequality::new(vec![BigRational::zero(); 2 * k], SymbolicAffine::zero());
            for (w, row) in weights.iter().zip(start.rows()) {
                if *w != 0 {
                    acc = acc.add(&row.scaled(&int(*w)));
                }
            }
            acc
        })
        .collect();
    InequalitySystem::new(k, rows)
}

/// One Fourier-Motzkin step: rows with a zero coefficient on `var` are kept;
/// every (positive, negative) pair is combined so that `var` cancels. Rows
/// are normalized to primitive integer left-hand sides and exact duplicates
/// are merged.
pub fn eliminate(sys: &InequalitySystem, var: usize) -> Result<InequalitySystem> {
    let dim = 2 * sys.k;
    if var >= dim {
        return Err(Error::VariableOutOfRange { index: var, dim });
    }
    let mut zero = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for row in &sys.rows {
        let c = row.coeff(var);
        if c.is_zero() {
            zero.push(row.normalized());
        } else if c.is_positive() {
            pos.push(row);
        } else {
            neg.push(row);
        }
    }
    let mut out = zero;
    for p in &pos {
        let a = p.coeff(var).clone();
        for n in &neg {
            let b = n.coeff(var).abs();
            let mut combined = p.scaled(&b).add(&n.scaled(&a));
            // exact cancellation; guard against any representation drift
            combined.lhs[var] = BigRational::zero();
            out.push(combined.normalized());
        }
    }
    InequalitySystem::new(sys.k, dedup(out))
}

fn dedup(rows: Vec<Inequality>) -> Vec<Inequality> {
    let mut seen = HashSet::new();
    rows.into_iter()
        .filter(|r| seen.insert(r.clone()))
        .collect()
}

/// Row counts around each elimination step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationStep {
    /// 1-based transmitter index of the eliminated `Rr_i`.
    pub transmitter: usize,
    pub rows_in: usize,
    pub rows_out: usize,
}

/// Eliminates `Rr_K, ..., Rr_1` in that order, pruning after each step.
pub fn eliminate_all_randomization(sys: &InequalitySystem) -> Result<InequalitySystem> {
    Ok(eliminate_all_randomization_traced(sys)?.0)
}

pub fn eliminate_all_randomization_traced(
    sys: &InequalitySystem,
) -> Result<(InequalitySystem, Vec<EliminationStep>)> {
    let k = sys.k;
    let mut cur = sys.clone();
    let mut trace = Vec::with_capacity(k);
    for i in (1..=k).rev() {
        let rows_in = cur.len();
        cur = eliminate_and_prune(&cur, randomization_var(k, i))?;
        trace.push(EliminationStep {
            transmitter: i,
            rows_in,
            rows_out: cur.len(),
        });
    }
    Ok((cur.canonical(), trace))
}

/// Why a row was removed: it is implied by the weighted sum of `parts`.
#[derive(Clone, Debug, PartialEq)]
pub struct PruneCertificate {
    pub removed: Inequality,
    pub parts: Vec<(BigRational, Inequality)>,
    /// `true` when the right-hand-side comparison relies on the
    /// sub/supermodularity of the bounds; `false` when the sum is exact.
    pub uses_dominance: bool,
}

impl PruneCertificate {
    /// Numerically confirms the certificate under one bound table:
    /// the weighted left-hand sides sum to the removed row's, and the
    /// weighted right-hand sides do not exceed it.
    pub fn verify(&self, bounds: &BoundTable, tol: f64) -> Result<bool> {
        let k = self.removed.k();
        let mut lhs = vec![BigRational::zero(); 2 * k];
        let mut rhs = 0.0;
        for (w, part) in &self.parts {
            for (acc, c) in lhs.iter_mut().zip(part.lhs()) {
                *acc += w * c;
            }
            rhs += to_f64(w) * part.rhs().eval(bounds)?;
        }
        Ok(lhs == self.removed.lhs && rhs <= self.removed.rhs().eval(bounds)? + tol)
    }
}

/// Families encoded by a right-hand side that is a nonnegative-integer sum
/// of `b+` symbols minus a nonnegative-integer sum of `b-` symbols, after
/// scaling by the returned factor.
struct EncodedFamilies {
    scale: BigInt,
    plus: Vec<(SubsetMask, u32)>,
    minus: Vec<(SubsetMask, u32)>,
}

fn encoded_families(row: &Inequality) -> Option<EncodedFamilies> {
    let rhs = row.rhs();
    if !rhs.constant_term().is_zero() {
        return None;
    }
    let mut scale = BigInt::one();
    for c in rhs.coeffs().values() {
        scale = scale.lcm(c.denom());
    }
    let scale_q = BigRational::from_integer(scale.clone());
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (&sym, c) in rhs.coeffs() {
        let c = c * &scale_q;
        match sym {
            Symbol::Plus(s) => plus.push((s, as_count(&c)?)),
            Symbol::Minus(s) => minus.push((s, as_count(&-c)?)),
        }
    }
    Some(EncodedFamilies { scale, plus, minus })
}

fn weighted_presence(k: usize, family: &[(SubsetMask, u32)]) -> Vec<u64> {
    let mut counts = vec![0u64; k];
    for &(s, m) in family {
        for (i, c) in counts.iter_mut().enumerate() {
            if s.contains_index(i) {
                *c += m as u64;
            }
        }
    }
    counts
}

fn scaled_counts(p: &PresenceVector, scale: &BigInt) -> Option<Vec<u64>> {
    let s = scale.to_u64()?;
    p.counts()
        .iter()
        .map(|&c| (c as u64).checked_mul(s))
        .collect()
}

/// Removes rows implied by sums of elementary rows present in the system.
///
/// A row qualifies only if its right-hand side encodes families whose
/// presence vectors match its left-hand side (the structure every
/// combination of the starting system has); other rows are kept. A
/// qualifying row is removed when either
///
/// * its compact decomposition, the elementary rows
///   `(thr_i(p+), thr_i(p-))` for `i = 1..max(t_max)`, is present and the
///   row is not itself that single elementary row. The right-hand side
///   comparison is the compact-form dominance of `b+`/`b-` sums; or
/// * its `b+` and `b-` families coincide and every `(S, S)` elementary row
///   they name is present, so the row is their exact sum.
///
/// Elementary rows are never removed. Duplicates are merged.
pub fn prune_by_compact_dominance(sys: &InequalitySystem) -> Result<InequalitySystem> {
    Ok(prune_with_certificates(sys)?.0)
}

pub fn prune_with_certificates(
    sys: &InequalitySystem,
) -> Result<(InequalitySystem, Vec<PruneCertificate>)> {
    let k = sys.k;
    let rows: Vec<Inequality> = dedup(sys.rows.iter().map(Inequality::normalized).collect());
    let mut classified = Vec::with_capacity(rows.len());
    for row in &rows {
        classified.push(classify(row)?);
    }
    let present: Present = rows
        .iter()
        .zip(&classified)
        .filter_map(|(r, (_, key))| key.map(|key| (key, r.clone())))
        .collect();

    let mut kept = Vec::with_capacity(rows.len());
    let mut certificates = Vec::new();
    for (row, (presences, key)) in rows.iter().zip(&classified) {
        if key.is_some() {
            kept.push(row.clone());
            continue;
        }
        match certify(row, presences, &present) {
            Some(c) => certificates.push(c),
            None => kept.push(row.clone()),
        }
    }
    Ok((InequalitySystem::new(k, kept)?.canonical(), certificates))
}

type Present = HashMap<(SubsetMask, SubsetMask), Inequality>;
type Presences = (PresenceVector, PresenceVector);

/// Presence vectors of a normalized row, and its `(S, T)` key when the row
/// is exactly the elementary row for that pair.
fn classify(row: &Inequality) -> Result<(Presences, Option<(SubsetMask, SubsetMask)>)> {
    let presences = row.presences()?;
    let (p, m) = &presences;
    let mut key = None;
    if p.t_max() <= 1 && m.t_max() <= 1 {
        let (s, t) = (p.threshold(1), m.threshold(1));
        if *row == Inequality::elementary(s, t) {
            key = Some((s, t));
        }
    }
    Ok((presences, key))
}

fn certify(row: &Inequality, presences: &Presences, present: &Present) -> Option<PruneCertificate> {
    let k = row.k();
    let fam = encoded_families(row)?;
    let (p, m) = presences;
    let consistent = scaled_counts(p, &fam.scale)? == weighted_presence(k, &fam.plus)
        && scaled_counts(m, &fam.scale)? == weighted_presence(k, &fam.minus);
    if !consistent {
        return None;
    }
    compact_certificate(row, p, m, present).or_else(|| literal_certificate(row, &fam, present))
}

/// Integer left-hand side of a normalized row.
fn int_lhs(row: &Inequality) -> Option<Vec<i64>> {
    row.lhs
        .iter()
        .map(|c| c.is_integer().then(|| c.to_integer().to_i64()).flatten())
        .collect()
}

/// `(S, T)` when an integer left-hand side has 0/1 presence vectors.
fn elementary_shape(lhs: &[i64]) -> Option<(u32, u32)> {
    let k = lhs.len() / 2;
    let (mut s, mut t) = (0u32, 0u32);
    for i in 0..k {
        let (p, m) = (lhs[i], lhs[i] - lhs[k + i]);
        match (p, m) {
            (0 | 1, 0 | 1) => {
                s |= (p as u32) << i;
                t |= (m as u32) << i;
            }
            _ => return None,
        }
    }
    Some((s, t))
}

/// One elimination step followed by pruning, without materializing the
/// rows that pruning would discard. Produces the same system as
/// `prune_by_compact_dominance(&eliminate(sys, var)?)`.
pub fn eliminate_and_prune(sys: &InequalitySystem, var: usize) -> Result<InequalitySystem> {
    let k = sys.k;
    let dim = 2 * k;
    if var >= dim {
        return Err(Error::VariableOutOfRange { index: var, dim });
    }
    let rows: Vec<Inequality> = sys.rows.iter().map(Inequality::normalized).collect();
    let mut zero = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for row in rows {
        let c = row.coeff(var).clone();
        if c.is_zero() {
            zero.push(row);
        } else {
            let ints = int_lhs(&row);
            if c.is_positive() {
                pos.push((row, ints));
            } else {
                neg.push((row, ints));
            }
        }
    }
    let combine = |p: &Inequality, n: &Inequality| {
        let a = p.coeff(var).clone();
        let b = n.coeff(var).abs();
        let mut combined = p.scaled(&b).add(&n.scaled(&a));
        combined.lhs[var] = BigRational::zero();
        combined.normalized()
    };
    // cheap integer preview of a combination's shape
    let preview = |p: &Option<Vec<i64>>, n: &Option<Vec<i64>>| -> Option<Option<(u32, u32)>> {
        let (p, n) = (p.as_ref()?, n.as_ref()?);
        let (a, b) = (p[var], -n[var]);
        let mut lhs: Vec<i64> = p.iter().zip(n).map(|(x, y)| b * x + a * y).collect();
        lhs[var] = 0;
        let g = lhs.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 0 {
            lhs.iter_mut().for_each(|x| *x /= g);
        }
        Some(elementary_shape(&lhs))
    };

    // pass 1: elementary rows that will be present
    let mut present: Present = HashMap::new();
    let note = |row: &Inequality, present: &mut Present| -> Result<()> {
        if let (_, Some(key)) = classify(row)? {
            present.entry(key).or_insert_with(|| row.clone());
        }
        Ok(())
    };
    for row in &zero {
        note(row, &mut present)?;
    }
    for (p, pi) in &pos {
        for (n, ni) in &neg {
            if let Some(None) = preview(pi, ni) {
                continue;
            }
            note(&combine(p, n), &mut present)?;
        }
    }

    // pass 2: everything that is neither elementary nor certified
    let mut kept: Vec<Inequality> = Vec::new();
    let mut seen: HashSet<Inequality> = HashSet::new();
    let mut consider = |row: Inequality, kept: &mut Vec<Inequality>| -> Result<()> {
        let (presences, key) = classify(&row)?;
        let keep = key.is_some() || certify(&row, &presences, &present).is_none();
        if keep && seen.insert(row.clone()) {
            kept.push(row);
        }
        Ok(())
    };
    for row in zero {
        consider(row, &mut kept)?;
    }
    for (p, _) in &pos {
        for (n, _) in &neg {
            consider(combine(p, n), &mut kept)?;
        }
    }
    Ok(InequalitySystem::new(k, kept)?.canonical())
}

fn compact_certificate(
    row: &Inequality,
    p: &PresenceVector,
    m: &PresenceVector,
    present: &Present,
) -> Option<PruneCertificate> {
    let levels = p.t_max().max(m.t_max());
    let mut parts = Vec::with_capacity(levels as usize);
    for level in 1..=levels {
        let key = (p.threshold(level), m.threshold(level));
        if key.0.is_empty() && key.1.is_empty() {
            continue;
        }
        parts.push((BigRational::one(), present.get(&key)?.clone()));
    }
    if parts.is_empty() {
        return None;
    }
    Some(PruneCertificate {
        removed: row.clone(),
        parts,
        uses_dominance: true,
    })
}

fn literal_certificate(
    row: &Inequality,
    fam: &EncodedFamilies,
    present: &Present,
) -> Option<PruneCertificate> {
    if fam.plus != fam.minus || fam.plus.is_empty() {
        return None;
    }
    let scale = BigRational::from_integer(fam.scale.clone());
    let parts = fam
        .plus
        .iter()
        .map(|&(s, mult)| {
            present
                .get(&(s, s))
                .map(|r| (int(mult as i64) / &scale, r.clone()))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(PruneCertificate {
        removed: row.clone(),
        parts,
        uses_dominance: false,
    })
}

/// Substitutes bound values into every row.
pub fn evaluate_system(sys: &InequalitySystem, bounds: &BoundTable) -> Result<NumericSystem> {
    if bounds.k() != sys.k {
        return Err(Error::Dimension(format!(
            "system has k = {}, bound table has k = {}",
            sys.k,
            bounds.k()
        )));
    }
    let rows = sys
        .rows
        .iter()
        .map(|r| Ok((r.lhs.iter().map(to_f64).collect(), r.rhs.eval(bounds)?)))
        .collect::<Result<Vec<_>>>()?;
    NumericSystem::new(2 * sys.k, rows)
}

/// Keeps only the rate coordinates `R_1..R_K` of a numeric system whose
/// randomization coefficients are all zero.
pub fn rate_part(sys: &NumericSystem, k: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    sys.rows()
        .iter()
        .map(|(a, b)| {
            if a[k..].iter().any(|&c| c != 0.0) {
                Err(Error::Dimension(
                    "row still involves randomization rates".into(),
                ))
            } else {
                Ok((a[..k].to_vec(), *b))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, s: &str) -> Inequality {
        Inequality::parse(s, k).unwrap()
    }

    fn sys(k: usize, text: &str) -> InequalitySystem {
        InequalitySystem::parse(text, k).unwrap()
    }

    #[test]
    fn build_system_k1() {
        let s = build_system(1).unwrap();
        assert_eq!(s.to_text(), "1*R1 + 1*Rr1 <= b+{1}\n-1*Rr1 <= -b-{1}\n");
    }

    #[test]
    fn build_system_row_counts() {
        assert_eq!(build_system(2).unwrap().len(), 6);
        assert_eq!(build_system(3).unwrap().len(), 14);
        assert_eq!(build_system(8).unwrap().len(), 2 * 255);
        assert!(build_system(0).is_err());
        assert!(build_system(9).is_err());
    }

    #[test]
    fn build_system_k2_rows() {
        let expected = "\
1*R1 + 1*Rr1 <= b+{1}
1*R2 + 1*Rr2 <= b+{2}
1*R1 + 1*R2 + 1*Rr1 + 1*Rr2 <= b+{1,2}
-1*Rr1 <= -b-{1}
-1*Rr2 <= -b-{2}
-1*Rr1 - 1*Rr2 <= -b-{1,2}
";
        assert_eq!(build_system(2).unwrap().to_text(), expected);
    }

    #[test]
    fn g_matrix_small() {
        assert_eq!(base_matrix_g(1).unwrap(), vec![vec![1, 1]]);
        let g2 = base_matrix_g(2).unwrap();
        assert_eq!(
            g2,
            vec![
                vec![1, 0, 0, 1, 0, 0],
                vec![0, 1, 0, 0, 1, 0],
                vec![0, 0, 1, 0, 0, 1]
            ]
        );
    }

    #[test]
    fn g_annihilates_randomization_block() {
        for k in 1..=6 {
            let prod =
                matmul(&base_matrix_g(k).unwrap(), &randomization_block(k).unwrap()).unwrap();
            assert_eq!(prod.len(), (1 << k) - 1);
            assert!(prod.iter().flatten().all(|&x| x == 0));
        }
    }

    #[test]
    fn g_rows_reproduce_closed_form() {
        for k in 1..=4 {
            assert_eq!(apply_g(k).unwrap(), closed_form_system(k).unwrap());
        }
    }

    #[test]
    fn textbook_projection() {
        // x + r <= 5, -r <= -2 over (x, r) with k = 1
        let s = InequalitySystem::new(
            1,
            vec![
                Inequality::new(vec![int(1), int(1)], SymbolicAffine::constant(int(5))),
                Inequality::new(vec![int(0), int(-1)], SymbolicAffine::constant(int(-2))),
            ],
        )
        .unwrap();
        let out = eliminate(&s, 1).unwrap();
        assert_eq!(out.to_text(), "1*R1 <= 3\n");
    }

    #[test]
    fn eliminate_k1() {
        let out = eliminate(&build_system(1).unwrap(), randomization_var(1, 1)).unwrap();
        assert_eq!(out.to_text(), "1*R1 <= b+{1} - b-{1}\n");
        assert!(eliminate(&build_system(1).unwrap(), 2).is_err());
    }

    #[test]
    fn full_elimination_k2() {
        let out = eliminate_all_randomization(&build_system(2).unwrap()).unwrap();
        assert_eq!(
            out.to_text(),
            "1*R1 <= b+{1} - b-{1}\n1*R2 <= b+{2} - b-{2}\n1*R1 + 1*R2 <= b+{1,2} - b-{1,2}\n"
        );
    }

    #[test]
    fn full_elimination_matches_closed_form() {
        for k in 1..=4 {
            let out = eliminate_all_randomization(&build_system(k).unwrap()).unwrap();
            assert_eq!(out, closed_form_system(k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn fused_step_matches_eliminate_then_prune() {
        for k in 1..=4 {
            let mut fused = build_system(k).unwrap();
            let mut plain = fused.clone();
            for i in (1..=k).rev() {
                let var = randomization_var(k, i);
                fused = eliminate_and_prune(&fused, var).unwrap();
                plain = prune_by_compact_dominance(&eliminate(&plain, var).unwrap()).unwrap();
                assert_eq!(fused, plain, "k = {k}, Rr{i}");
            }
        }
    }

    #[test]
    fn prune_sum_of_two_canonical_rows() {
        let s = sys(
            2,
            "1*R1 <= b+{1} - b-{1}\n1*R2 <= b+{2} - b-{2}\n1*R1 + 1*R2 <= b+{1} + b+{2} - b-{1} - b-{2}\n",
        );
        let out = prune_by_compact_dominance(&s).unwrap();
        assert_eq!(
            out.to_text(),
            "1*R1 <= b+{1} - b-{1}\n1*R2 <= b+{2} - b-{2}\n"
        );
    }

    #[test]
    fn prune_two_level_row() {
        let s = sys(
            2,
            "1*R1 <= b+{1} - b-{1}\n1*R2 <= b+{2} - b-{2}\n1*R1 + 1*R2 <= b+{1,2} - b-{1,2}\n\
             2*R1 + 1*R2 <= b+{1} + b+{1,2} - b-{1} - b-{1,2}\n",
        );
        let (out, certs) = prune_with_certificates(&s).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(certs.len(), 1);
        assert_eq!(certs[0].parts.len(), 2);
    }

    #[test]
    fn canonical_row_alone_is_kept() {
        let s = sys(2, "1*R1 <= b+{1} - b-{1}\n");
        assert_eq!(prune_by_compact_dominance(&s).unwrap(), s);
    }

    #[test]
    fn duplicates_merge_up_to_scaling() {
        let s = sys(2, "1*R1 <= b+{1} - b-{1}\n2*R1 <= 2*b+{1} - 2*b-{1}\n");
        assert_eq!(prune_by_compact_dominance(&s).unwrap().len(), 1);
    }

    #[test]
    fn negative_rate_coefficient_rejected() {
        let s = sys(2, "-1*R1 <= b+{1}\n");
        assert!(matches!(
            prune_by_compact_dominance(&s),
            Err(Error::NegativeCoefficient(_))
        ));
    }

    #[test]
    fn unstructured_rhs_is_kept() {
        // the right-hand side does not encode families matching the lhs
        let s = sys(
            2,
            "1*R1 <= b+{1} - b-{1}\n1*R2 <= b+{2} - b-{2}\n1*R1 + 1*R2 <= b+{1} - b-{2}\n",
        );
        assert_eq!(prune_by_compact_dominance(&s).unwrap().len(), 3);
    }

    #[test]
    fn text_round_trip() {
        for text in [
            "1*R1 + 1*R2 <= b+{1,2} - b-{1,2}",
            "-1*Rr1 - 1*Rr3 <= -b-{1,3}",
            "2*R1 + 1/2*Rr2 <= 3/4*b+{1} - 2*b-{2} + 1",
            "0 <= 0",
        ] {
            let r = parse_row(text, 3).unwrap();
            assert_eq!(r.to_string(), text);
        }
        assert!(parse_row("1*R4 <= 0", 3).is_err());
        assert!(parse_row("1*R1 < 0", 3).is_err());
        assert!(parse_row("1*R1 <= b*{1}", 3).is_err());
    }

    #[test]
    fn evaluate_zero_table() {
        let final_sys = closed_form_system(3).unwrap();
        let ns = evaluate_system(&final_sys, &BoundTable::zeros(3).unwrap()).unwrap();
        assert!(ns.rows().iter().all(|(_, b)| *b == 0.0));
        assert!(evaluate_system(&final_sys, &BoundTable::zeros(2).unwrap()).is_err());
    }

    #[test]
    fn symbolic_evaluation_is_linear() {
        let a = row(2, "1*R1 <= b+{1} - 2*b-{1,2}");
        let b = row(2, "1*R1 <= 3*b-{2} + 1/2");
        let mut bt = BoundTable::zeros(2).unwrap();
        for (i, s) in SubsetMask::all_nonempty(2).unwrap().enumerate() {
            bt.set_plus(s, 0.3 + i as f64);
            bt.set_minus(s, 0.1 * i as f64);
        }
        let sum = a.rhs() + b.rhs();
        let lhs = sum.eval(&bt).unwrap();
        let rhs = a.rhs().eval(&bt).unwrap() + b.rhs().eval(&bt).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
