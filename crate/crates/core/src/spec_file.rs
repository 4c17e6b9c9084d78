//! JSON channel/policy description.
//!
//! ```json
//! {
//!   "k": 2,
//!   "q_size": 1,
//!   "v_sizes": [2, 2],
//!   "x_sizes": [2, 2],
//!   "y_size": 2,
//!   "z_size": 2,
//!   "p_q": [1.0],
//!   "p_v_given_q": [[[0.5, 0.5]], [[0.5, 0.5]]],
//!   "p_x_given_v": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]],
//!   "p_yz_given_x": [ ... ]
//! }
//! ```
//!
//! `p_v_given_q[i][q]` is the pmf of `V_{i+1}` given `Q = q`,
//! `p_x_given_v[i][v]` the pmf of `X_{i+1}` given `V_{i+1} = v`, and
//! `p_yz_given_x` is flat, row-major with `x_1` outermost, then
//! `x_2..x_K`, then `y`, then `z`. Every slice must sum to 1 within 1e-9.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::infotheory::{joint_distribution, ChannelSpec, InputPolicy, JointDistribution};

/// Load-time normalization tolerance.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub k: usize,
    pub q_size: usize,
    pub v_sizes: Vec<usize>,
    pub x_sizes: Vec<usize>,
    pub y_size: usize,
    pub z_size: usize,
    pub p_q: Vec<f64>,
    pub p_v_given_q: Vec<Vec<Vec<f64>>>,
    pub p_x_given_v: Vec<Vec<Vec<f64>>>,
    pub p_yz_given_x: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    /// Malformed JSON or wrong field types.
    #[error("cannot parse spec: {0}")]
    Parse(String),
    /// Well-formed JSON that violates a pmf or shape invariant.
    #[error("invalid spec: {0}")]
    Invariant(#[from] Error),
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_parts(channel: &ChannelSpec, policy: &InputPolicy) -> Self {
        Self {
            k: channel.k(),
            q_size: policy.q_size(),
            v_sizes: policy.v_sizes(),
            x_sizes: channel.x_sizes().to_vec(),
            y_size: channel.y_size(),
            z_size: channel.z_size(),
            p_q: policy.p_q().to_vec(),
            p_v_given_q: policy.p_v_given_q().to_vec(),
            p_x_given_v: policy.p_x_given_v().to_vec(),
            p_yz_given_x: channel.kernel().to_vec(),
        }
    }

    fn check_shapes(&self) -> Result<(), Error> {
        let k = self.k;
        let dim = |what: String| Err(Error::Dimension(what));
        if self.v_sizes.len() != k || self.x_sizes.len() != k {
            return dim(format!("v_sizes/x_sizes must list {k} alphabets"));
        }
        if self.p_q.len() != self.q_size {
            return dim(format!(
                "p_q has {} entries, q_size is {}",
                self.p_q.len(),
                self.q_size
            ));
        }
        if self.p_v_given_q.len() != k || self.p_x_given_v.len() != k {
            return dim(format!(
                "p_v_given_q and p_x_given_v must cover {k} transmitters"
            ));
        }
        for i in 0..k {
            let rows = &self.p_v_given_q[i];
            if rows.len() != self.q_size {
                return dim(format!(
                    "p_v_given_q[{}] has {} rows, q_size is {}",
                    i + 1,
                    rows.len(),
                    self.q_size
                ));
            }
            if let Some((q, r)) = rows
                .iter()
                .enumerate()
                .find(|(_, r)| r.len() != self.v_sizes[i])
            {
                return dim(format!(
                    "p_v_given_q[{}][q={q}] has {} entries, v_sizes[{i}] is {}",
                    i + 1,
                    r.len(),
                    self.v_sizes[i]
                ));
            }
            let rows = &self.p_x_given_v[i];
            if rows.len() != self.v_sizes[i] {
                return dim(format!(
                    "p_x_given_v[{}] has {} rows, v_sizes[{i}] is {}",
                    i + 1,
                    rows.len(),
                    self.v_sizes[i]
                ));
            }
            if let Some((v, r)) = rows
                .iter()
                .enumerate()
                .find(|(_, r)| r.len() != self.x_sizes[i])
            {
                return dim(format!(
                    "p_x_given_v[{}][v={v}] has {} entries, x_sizes[{i}] is {}",
                    i + 1,
                    r.len(),
                    self.x_sizes[i]
                ));
            }
        }
        Ok(())
    }

    /// Validates and converts to the model types.
    pub fn to_model(&self) -> Result<(ChannelSpec, InputPolicy), SpecError> {
        self.check_shapes()?;
        let channel = ChannelSpec::with_tolerance(
            self.x_sizes.clone(),
            self.y_size,
            self.z_size,
            self.p_yz_given_x.clone(),
            LOAD_TOL,
        )?;
        let policy = InputPolicy::with_tolerance(
            self.p_q.clone(),
            self.p_v_given_q.clone(),
            self.p_x_given_v.clone(),
            LOAD_TOL,
        )?;
        Ok((channel, policy))
    }

    pub fn joint(&self) -> Result<JointDistribution, SpecError> {
        let (channel, policy) = self.to_model()?;
        Ok(joint_distribution(&channel, &policy)?)
    }
}

/// The two-user example: uniform bits sent uncoded, the receiver sees
/// `V1 xor V2` and the eavesdropper sees `V1 and V2`.
pub fn xor_and_example() -> SpecFile {
    let mut w = Vec::with_capacity(16);
    for x1 in 0..2usize {
        for x2 in 0..2usize {
            for y in 0..2usize {
                for z in 0..2usize {
                    w.push(if y == x1 ^ x2 && z == x1 & x2 {
                        1.0
                    } else {
                        0.0
                    });
                }
            }
        }
    }
    let ident = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    SpecFile {
        k: 2,
        q_size: 1,
        v_sizes: vec![2, 2],
        x_sizes: vec![2, 2],
        y_size: 2,
        z_size: 2,
        p_q: vec![1.0],
        p_v_given_q: vec![vec![vec![0.5, 0.5]], vec![vec![0.5, 0.5]]],
        p_x_given_v: vec![ident.clone(), ident],
        p_yz_given_x: w,
    }
}
