//! Seeded verification and property sweeps shared by the CLI and the
//! acceptance tests.

use crate::error::Result;
use crate::fourier_motzkin::{build_system, evaluate_system, randomization_var, rate_part};
use crate::infotheory::{
    bound_table, check_dominance_sums, check_modularity, joint_distribution, BoundTable,
};
use crate::oracle::oracle_fm;
use crate::random::{random_family, random_pair, seeded, SweepRng};
use crate::region::{closed_form_region, polytope_equal, RateRegion};
use crate::subsets::{
    compact_form_direct, compact_form_recursive, presence_vector, SetFamily, SubsetMask,
};

/// Tolerance for the oracle-vs-closed-form comparison.
pub const EQUIVALENCE_TOL: f64 = 1e-9;
/// Floor for sub/supermodularity and dominance residuals.
pub const RESIDUAL_FLOOR: f64 = -1e-10;
/// Alphabet bound used for random channels.
pub const MAX_ALPHABET: usize = 3;

/// Region obtained by floating-point elimination of every `Rr_i` from the
/// evaluated starting system.
pub fn oracle_region(bounds: &BoundTable) -> Result<RateRegion> {
    let k = bounds.k();
    let numeric = evaluate_system(&build_system(k)?, bounds)?;
    let order: Vec<usize> = (1..=k).rev().map(|i| randomization_var(k, i)).collect();
    let projected = oracle_fm(&numeric, &order)?;
    RateRegion::new(k, rate_part(&projected, k)?)
}

/// Oracle elimination vs the closed form for one bound table.
pub fn verify_bounds(bounds: &BoundTable) -> Result<bool> {
    let oracle = oracle_region(bounds)?;
    Ok(polytope_equal(
        &oracle,
        &closed_form_region(bounds),
        EQUIVALENCE_TOL,
    ))
}

/// Bound table of the next random channel/policy pair.
pub fn random_bounds(rng: &mut SweepRng, k: usize) -> Result<BoundTable> {
    let (channel, policy) = random_pair(rng, k, MAX_ALPHABET)?;
    bound_table(&joint_distribution(&channel, &policy)?)
}

#[derive(Clone, Debug)]
pub struct VerifyTrial {
    pub index: usize,
    pub bounds: BoundTable,
    pub passed: bool,
}

/// `n` seeded random channels with `k` transmitters, each checked with
/// [`verify_bounds`].
pub fn verify_random(n: usize, k: usize, seed: u64) -> Result<Vec<VerifyTrial>> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|index| {
            let bounds = random_bounds(&mut rng, k)?;
            let passed = verify_bounds(&bounds)?;
            Ok(VerifyTrial {
                index,
                bounds,
                passed,
            })
        })
        .collect()
}

/// Minimum residuals seen during a property sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PropsReport {
    pub distributions: usize,
    pub modularity_checks: usize,
    pub dominance_checks: usize,
    pub min_submodular: f64,
    pub min_supermodular: f64,
    pub min_dominance_plus: f64,
    pub min_dominance_minus: f64,
    /// First violating instance, rendered for the report.
    pub violation: Option<String>,
}

impl PropsReport {
    fn new() -> Self {
        Self {
            distributions: 0,
            modularity_checks: 0,
            dominance_checks: 0,
            min_submodular: f64::INFINITY,
            min_supermodular: f64::INFINITY,
            min_dominance_plus: f64::INFINITY,
            min_dominance_minus: f64::INFINITY,
            violation: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn render_bounds(bounds: &BoundTable) -> String {
    let parts: Vec<String> = SubsetMask::all_nonempty(bounds.k())
        .expect("valid k")
        .map(|s| format!("{s}: b+={:.12} b-={:.12}", bounds.plus(s), bounds.minus(s)))
        .collect();
    parts.join("; ")
}

/// Checks sub/supermodularity on every pair of subsets and compact-form
/// dominance on `families_per_distribution` random families of length at
/// most 4, over `n` seeded random distributions.
pub fn props_random(
    n: usize,
    k: usize,
    seed: u64,
    families_per_distribution: usize,
) -> Result<PropsReport> {
    let mut rng = seeded(seed);
    let mut report = PropsReport::new();
    for _ in 0..n {
        let bounds = random_bounds(&mut rng, k)?;
        modularity_all_pairs(&bounds, &mut report);
        for _ in 0..families_per_distribution {
            let family = random_family(&mut rng, k, 4)?;
            dominance(&bounds, &family, &mut report)?;
        }
        report.distributions += 1;
    }
    Ok(report)
}

/// Every pair `(T1, T2)` of subsets, the empty set included.
pub fn modularity_all_pairs(bounds: &BoundTable, report: &mut PropsReport) {
    let k = bounds.k();
    for t1 in SubsetMask::all(k).expect("valid k") {
        for t2 in SubsetMask::all(k).expect("valid k") {
            let (plus, minus) = check_modularity(bounds, t1, t2);
            report.modularity_checks += 1;
            report.min_submodular = report.min_submodular.min(plus);
            report.min_supermodular = report.min_supermodular.min(minus);
            if (plus < RESIDUAL_FLOOR || minus < RESIDUAL_FLOOR) && report.violation.is_none() {
                report.violation = Some(format!(
                    "modularity at T1={t1}, T2={t2}: residuals ({plus:e}, {minus:e}); bounds {}",
                    render_bounds(bounds)
                ));
            }
        }
    }
}

pub fn dominance(bounds: &BoundTable, family: &SetFamily, report: &mut PropsReport) -> Result<()> {
    let (plus, minus) = check_dominance_sums(bounds, family)?;
    report.dominance_checks += 1;
    report.min_dominance_plus = report.min_dominance_plus.min(plus);
    report.min_dominance_minus = report.min_dominance_minus.min(minus);
    if (plus < RESIDUAL_FLOOR || minus < RESIDUAL_FLOOR) && report.violation.is_none() {
        report.violation = Some(format!(
            "dominance for family {family}: residuals ({plus:e}, {minus:e}); bounds {}",
            render_bounds(bounds)
        ));
    }
    Ok(())
}

/// Counts from the exhaustive compact-form sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactSweep {
    pub families: usize,
    /// First family where the recursive and threshold constructions differ.
    pub recursion_mismatch: Option<SetFamily>,
    /// First family whose compact form changes the presence vector.
    pub presence_mismatch: Option<SetFamily>,
}

impl CompactSweep {
    pub fn passed(&self) -> bool {
        self.recursion_mismatch.is_none() && self.presence_mismatch.is_none()
    }
}

/// Every ordered family of length `1..=max_t` over `{1..k}` for
/// `k = 1..=max_k`, empty members included.
pub fn exhaustive_compact_sweep(max_k: usize, max_t: usize) -> Result<CompactSweep> {
    let mut out = CompactSweep {
        families: 0,
        recursion_mismatch: None,
        presence_mismatch: None,
    };
    for k in 1..=max_k {
        let subsets: Vec<SubsetMask> = SubsetMask::all(k)?.collect();
        let n = subsets.len();
        for t in 1..=max_t {
            let total = n.pow(t as u32);
            for code in 0..total {
                let mut rest = code;
                let members = (0..t)
                    .map(|_| {
                        let m = subsets[rest % n];
                        rest /= n;
                        m
                    })
                    .collect();
                let family = SetFamily::new(k, members)?;
                let direct = compact_form_direct(&family)?;
                let recursive = compact_form_recursive(&family)?;
                if direct != recursive && out.recursion_mismatch.is_none() {
                    out.recursion_mismatch = Some(family.clone());
                }
                if presence_vector(&direct) != presence_vector(&family)
                    && out.presence_mismatch.is_none()
                {
                    out.presence_mismatch = Some(family.clone());
                }
                out.families += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exhaustive_sweep() {
        let s = exhaustive_compact_sweep(2, 2).unwrap();
        // k=1: 2 + 4, k=2: 4 + 16
        assert_eq!(s.families, 26);
        assert!(s.passed());
    }

    #[test]
    fn zero_trials_is_vacuous() {
        let r = props_random(0, 3, 1, 5).unwrap();
        assert!(r.passed());
        assert_eq!(r.distributions, 0);
    }

    #[test]
    fn a_few_verify_trials_pass() {
        for t in verify_random(3, 2, 42).unwrap() {
            assert!(t.passed, "trial {} failed", t.index);
        }
    }
}
